#include "qpres/smalldiv.hpp"

#include <algorithm>
#include <cmath>

#include "qpres/parallel.hpp"

namespace qpres {

namespace {

constexpr double kResonanceScale = 1e-14;

void check_resonance(double value, long l1) {
  if (value < kResonanceScale * (1.0 + double(l1)))
    throw Error(Error::Kind::resonance,
                "rationally dependent frequencies: |omega.nu| = " + std::to_string(value) +
                    " at |nu| = " + std::to_string(l1));
}

// Best |dot + omega_a * k| over integer k in [-span, span], excluding k = 0
// when exclude_zero is set.  The objective is V-shaped in k, so the floor and
// ceiling of the real minimiser (clamped to the range) are the only candidates.
double best_pivot(double dot, double wa, long span, long tail_l1, bool exclude_zero) {
  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](long k) {
    if (k < -span || k > span) return;
    if (exclude_zero && k == 0) return;
    double v = std::abs(dot + wa * double(k));
    check_resonance(v, tail_l1 + std::labs(k));
    best = std::min(best, v);
  };
  double t = -dot / wa;
  long k0 = static_cast<long>(std::floor(t));
  for (long k : {k0, k0 + 1}) consider(std::clamp(k, -span, span));
  if (exclude_zero) {
    consider(-1);
    consider(1);
  }
  return best;
}

// Enumerate the tail coordinates (all but the pivot axis) recursively.
double scan_tail(const std::vector<double>& omega, const std::vector<int>& axes, size_t pos,
                 long radius, long used, double dot, double wa, long span_axis_dummy) {
  (void)span_axis_dummy;
  if (pos == axes.size()) {
    long span = radius - used;
    return best_pivot(dot, wa, span, used, used == 0);
  }
  double best = std::numeric_limits<double>::infinity();
  int ax = axes[pos];
  long room = radius - used;
  for (long v = -room; v <= room; ++v) {
    double b = scan_tail(omega, axes, pos + 1, radius, used + std::labs(v),
                         dot + omega[ax] * double(v), wa, 0);
    best = std::min(best, b);
  }
  return best;
}

}  // namespace

double alpha_min(const std::vector<double>& omega, long radius) {
  const int d = static_cast<int>(omega.size());
  if (d == 0 || radius < 1) throw Error(Error::Kind::precondition, "alpha_min: empty problem");
  int pivot = 0;
  for (int i = 1; i < d; ++i)
    if (std::abs(omega[i]) > std::abs(omega[pivot])) pivot = i;
  const double wa = omega[pivot];
  if (wa == 0.0) throw Error(Error::Kind::resonance, "zero frequency component");
  if (d == 1) {
    double v = std::abs(wa);
    check_resonance(v, 1);
    return v;
  }
  std::vector<int> axes;
  for (int i = 0; i < d; ++i)
    if (i != pivot) axes.push_back(i);

  // parallel over the first tail coordinate, min-reduced (order independent)
  const int ax0 = axes[0];
  const std::vector<int> rest(axes.begin() + 1, axes.end());
  const size_t slots = static_cast<size_t>(2 * radius + 1);
  return par::indexed_min(slots, std::numeric_limits<double>::infinity(), [&](size_t s) {
    long v = static_cast<long>(s) - radius;
    return scan_tail(omega, rest, 0, radius, std::labs(v), omega[ax0] * double(v), wa, 0);
  });
}

namespace {

double brute_rec(const std::vector<double>& omega, size_t axis, long room, double dot, long l1) {
  if (axis + 1 == omega.size()) {
    double best = std::numeric_limits<double>::infinity();
    for (long v = -room; v <= room; ++v) {
      if (l1 == 0 && v == 0) continue;
      double x = std::abs(dot + omega[axis] * double(v));
      check_resonance(x, l1 + std::labs(v));
      best = std::min(best, x);
    }
    return best;
  }
  double best = std::numeric_limits<double>::infinity();
  for (long v = -room; v <= room; ++v)
    best = std::min(best, brute_rec(omega, axis + 1, room - std::labs(v),
                                    dot + omega[axis] * double(v), l1 + std::labs(v)));
  return best;
}

}  // namespace

double alpha_min_bruteforce(const std::vector<double>& omega, long radius) {
  if (omega.empty() || radius < 1)
    throw Error(Error::Kind::precondition, "alpha_min_bruteforce: empty problem");
  return brute_rec(omega, 0, radius, 0.0, 0);
}

double alpha_n(const std::vector<double>& omega, int n, long budget_radius) {
  if (n < 0) throw Error(Error::Kind::precondition, "alpha_n: n must be >= 0");
  if (n >= 63 || (1L << n) > budget_radius)
    throw Error(Error::Kind::budget,
                "alpha_n: lattice radius 2^" + std::to_string(n) + " exceeds the search budget");
  return alpha_min(omega, 1L << n);
}

ScaleProfile build_profile(const std::vector<double>& omega, int N_profile, long budget_radius) {
  if (N_profile < 0) throw Error(Error::Kind::precondition, "build_profile: N_profile < 0");
  ScaleProfile prof;
  prof.omega = omega;
  prof.N_profile = N_profile;

  auto ensure_alpha = [&](int j) {
    while (static_cast<int>(prof.alphas.size()) <= j)
      prof.alphas.push_back(alpha_n(omega, static_cast<int>(prof.alphas.size()), budget_radius));
    return prof.alphas[j];
  };

  int m = 0;
  for (int n = 0; n <= N_profile; ++n) {
    prof.m_seq.push_back(m);
    double am = ensure_alpha(m);
    int q = 0;
    while (am < 2.0 * ensure_alpha(m + q + 1)) ++q;
    prof.p_seq.push_back(q);
    m += q + 1;
  }
  ensure_alpha(N_profile);
  double partial = 0.0;
  for (int j = 0; j <= N_profile; ++j) {
    partial += std::log(1.0 / prof.alphas[j]) / double(1L << j);
    prof.bryuno_partials.push_back(partial);
  }
  prof.check_invariants();
  return prof;
}

void ScaleProfile::check_invariants() const {
  for (size_t j = 1; j < alphas.size(); ++j)
    if (alphas[j] > alphas[j - 1])
      throw Error(Error::Kind::precondition, "alpha sequence must be non-increasing");
  for (size_t n = 1; n < m_seq.size(); ++n) {
    if (m_seq[n] != m_seq[n - 1] + p_seq[n - 1] + 1)
      throw Error(Error::Kind::precondition, "m sequence mismatch");
    if (alpha_m(static_cast<int>(n)) >= alpha_m(static_cast<int>(n) - 1))
      throw Error(Error::Kind::precondition, "alpha_{m_n} must decrease strictly");
  }
  for (int p : p_seq)
    if (p < 0) throw Error(Error::Kind::precondition, "p_n must be >= 0");
  for (double a : alphas)
    if (!(a > 0.0)) throw Error(Error::Kind::resonance, "non-positive alpha");
}

namespace {
double bump(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }
}  // namespace

double Cutoffs::chi(double x) {
  const double a = bump(2.0 - 2.0 * std::abs(x));
  if (a == 0.0) return 0.0;
  const double b = bump(2.0 * std::abs(x) - 1.0);
  return a / (a + b);
}

double Cutoffs::xi(double x) {
  const double a = bump(2.0 - 2.0 * x);
  if (a == 0.0) return 0.0;
  const double b = bump(2.0 * x - 1.0);
  return a / (a + b);
}

double Cutoffs::chi_n(int n, double x) const {
  if (n < 0) return 1.0;
  return chi(8.0 * x / prof_->alpha_m(n));
}

double Cutoffs::Psi_n(int n, double x) const {
  if (n < 0) throw Error(Error::Kind::precondition, "Psi_n needs n >= 0");
  return chi_n(n - 1, x) * psi_n(n, x);
}

double Cutoffs::xi_n(int n, double x) const {
  if (n < 0) return 1.0;
  const double a = prof_->alpha_m(n + 1);
  return xi(256.0 * x / (a * a));
}

double Cutoffs::partition_sum(int p, double x) const {
  double s = psi_n(p, x);
  for (int n = p + 1; n <= prof_->N_profile; ++n) s += Psi_n(n, x);
  return s;
}

std::vector<int> Cutoffs::admissible_scales(double x) const {
  std::vector<int> out;
  for (int n = 0; n <= prof_->N_profile; ++n)
    if (Psi_n(n, x) != 0.0) out.push_back(n);
  return out;
}

int Cutoffs::min_scale(double x) const {
  auto sc = admissible_scales(x);
  if (sc.empty())
    throw Error(Error::Kind::budget, "x = " + std::to_string(x) +
                                         " is below the resolved band of the scale profile");
  return sc.front();
}

}  // namespace qpres
