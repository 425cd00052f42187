#include "qpres/trig.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qpres {

namespace {
constexpr cplx kI{0.0, 1.0};
}

TrigPoly TrigPoly::constant(cplx c) {
  TrigPoly t;
  if (c != 0.0) t.h_[0] = c;
  t.real_ = (c.imag() == 0.0);
  return t;
}

TrigPoly TrigPoly::harmonic(int m, cplx c) {
  TrigPoly t;
  if (c != 0.0) t.h_[m] = c;
  t.real_ = (m == 0 && c.imag() == 0.0) || c == 0.0;
  return t;
}

TrigPoly TrigPoly::cosine(int m, double amp) {
  TrigPoly t;
  if (amp != 0.0) {
    t.h_[m] += amp / 2.0;
    t.h_[-m] += amp / 2.0;
    t.trim();
  }
  return t;
}

TrigPoly TrigPoly::sine(int m, double amp) {
  TrigPoly t;
  if (amp != 0.0 && m != 0) {
    t.h_[m] += cplx(0.0, -amp / 2.0);
    t.h_[-m] += cplx(0.0, amp / 2.0);
  }
  return t;
}

cplx TrigPoly::coeff(int m) const {
  auto it = h_.find(m);
  return it == h_.end() ? cplx{} : it->second;
}

void TrigPoly::set_coeff(int m, cplx v) {
  if (v == 0.0)
    h_.erase(m);
  else
    h_[m] = v;
}

int TrigPoly::max_harmonic() const {
  int m = 0;
  for (const auto& [k, c] : h_) m = std::max({m, k, -k});
  return m;
}

TrigPoly& TrigPoly::operator+=(const TrigPoly& o) {
  for (const auto& [m, c] : o.h_) {
    auto& v = h_[m];
    v += c;
    if (v == 0.0) h_.erase(m);
  }
  real_ = real_ && o.real_;
  return *this;
}

TrigPoly& TrigPoly::operator-=(const TrigPoly& o) {
  for (const auto& [m, c] : o.h_) {
    auto& v = h_[m];
    v -= c;
    if (v == 0.0) h_.erase(m);
  }
  real_ = real_ && o.real_;
  return *this;
}

TrigPoly TrigPoly::operator*(const TrigPoly& o) const {
  TrigPoly out;
  for (const auto& [m1, c1] : h_)
    for (const auto& [m2, c2] : o.h_) out.h_[m1 + m2] += c1 * c2;
  out.trim();
  out.real_ = real_ && o.real_;
  return out;
}

TrigPoly TrigPoly::scaled(cplx s) const {
  TrigPoly out;
  if (s == 0.0) return out;
  for (const auto& [m, c] : h_) out.h_[m] = c * s;
  out.real_ = real_ && s.imag() == 0.0;
  return out;
}

TrigPoly TrigPoly::diff() const {
  TrigPoly out;
  for (const auto& [m, c] : h_)
    if (m != 0) out.h_[m] = kI * double(m) * c;
  out.real_ = real_;
  return out;
}

TrigPoly TrigPoly::diff(int p) const {
  TrigPoly out = *this;
  for (int i = 0; i < p; ++i) out = out.diff();
  return out;
}

TrigPoly TrigPoly::conjugated() const {
  TrigPoly out;
  for (const auto& [m, c] : h_) out.h_[-m] = std::conj(c);
  out.real_ = real_;
  return out;
}

TrigPoly TrigPoly::phase_shifted(double delta) const {
  TrigPoly out;
  for (const auto& [m, c] : h_) out.h_[m] = c * std::exp(kI * (double(m) * delta));
  out.real_ = real_;
  return out;
}

TrigPoly TrigPoly::antiderivative() const {
  TrigPoly out;
  for (const auto& [m, c] : h_)
    if (m != 0) out.h_[m] = c / (kI * double(m));
  out.real_ = real_;
  return out;
}

cplx TrigPoly::eval(double beta0) const {
  cplx s{};
  for (const auto& [m, c] : h_) s += c * std::exp(kI * (double(m) * beta0));
  return s;
}

double TrigPoly::eval_real(double beta0) const { return eval(beta0).real(); }

double TrigPoly::l1_norm() const {
  double s = 0.0;
  for (const auto& [m, c] : h_) s += std::abs(c);
  return s;
}

double TrigPoly::max_abs_coeff() const {
  double s = 0.0;
  for (const auto& [m, c] : h_) s = std::max(s, std::abs(c));
  return s;
}

double TrigPoly::reality_defect() const {
  double d = 0.0;
  for (const auto& [m, c] : h_) d = std::max(d, std::abs(coeff(-m) - std::conj(c)));
  return d;
}

void TrigPoly::trim(double drop) {
  for (auto it = h_.begin(); it != h_.end();) {
    if (std::abs(it->second) <= drop)
      it = h_.erase(it);
    else
      ++it;
  }
}

double max_coeff_distance(const TrigPoly& a, const TrigPoly& b) {
  double d = 0.0;
  for (const auto& [m, c] : a.harmonics()) d = std::max(d, std::abs(c - b.coeff(m)));
  for (const auto& [m, c] : b.harmonics()) d = std::max(d, std::abs(c - a.coeff(m)));
  return d;
}

BPoly BPoly::from_trig(TrigPoly t) {
  BPoly p;
  if (!t.is_zero()) p.c_.push_back(std::move(t));
  return p;
}

const TrigPoly& BPoly::coeff(int j) const {
  static const TrigPoly zero{};
  if (j < 0 || j >= static_cast<int>(c_.size())) return zero;
  return c_[j];
}

TrigPoly& BPoly::at(int j) {
  if (j >= static_cast<int>(c_.size())) c_.resize(j + 1);
  return c_[j];
}

BPoly& BPoly::operator+=(const BPoly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
  for (size_t j = 0; j < o.c_.size(); ++j) c_[j] += o.c_[j];
  shrink();
  return *this;
}

BPoly BPoly::operator*(const BPoly& o) const {
  BPoly out;
  if (c_.empty() || o.c_.empty()) return out;
  out.c_.resize(c_.size() + o.c_.size() - 1);
  for (size_t a = 0; a < c_.size(); ++a)
    for (size_t b = 0; b < o.c_.size(); ++b) out.c_[a + b] += c_[a] * o.c_[b];
  out.shrink();
  return out;
}

BPoly BPoly::scaled(cplx s) const {
  BPoly out;
  out.c_.reserve(c_.size());
  for (const auto& t : c_) out.c_.push_back(t.scaled(s));
  out.shrink();
  return out;
}

BPoly BPoly::scaled_trig(const TrigPoly& t) const {
  BPoly out;
  out.c_.reserve(c_.size());
  for (const auto& cj : c_) out.c_.push_back(cj * t);
  out.shrink();
  return out;
}

BPoly BPoly::dB() const {
  BPoly out;
  for (int j = 1; j <= degree(); ++j) out.c_.push_back(c_[j].scaled(double(j)));
  out.shrink();
  return out;
}

BPoly BPoly::dBeta() const {
  BPoly out;
  out.c_.reserve(c_.size());
  for (const auto& t : c_) out.c_.push_back(t.diff());
  out.shrink();
  return out;
}

BPoly BPoly::dB(int q) const {
  BPoly out = *this;
  for (int i = 0; i < q; ++i) out = out.dB();
  return out;
}

BPoly BPoly::dBeta(int p) const {
  BPoly out = *this;
  for (int i = 0; i < p; ++i) out = out.dBeta();
  return out;
}

TrigPoly BPoly::jet(int p, int q) const {
  double fact = 1.0;
  for (int i = 2; i <= q; ++i) fact *= i;
  return coeff(q).scaled(fact).diff(p);
}

TrigPoly BPoly::eval_dB(double db) const {
  TrigPoly out;
  double pw = 1.0;
  for (int j = 0; j <= degree(); ++j) {
    out += c_[j].scaled(pw);
    pw *= db;
  }
  return out;
}

cplx BPoly::eval(double beta0, double db) const { return eval_dB(db).eval(beta0); }

BPoly BPoly::conjugated() const {
  BPoly out;
  out.c_.reserve(c_.size());
  for (const auto& t : c_) out.c_.push_back(t.conjugated());
  out.shrink();
  return out;
}

double BPoly::l1_norm() const {
  double s = 0.0;
  for (const auto& t : c_) s += t.l1_norm();
  return s;
}

void BPoly::trim(double drop) {
  for (auto& t : c_) t.trim(drop);
  shrink();
}

void BPoly::shrink() {
  while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

}  // namespace qpres
