#pragma once

#include <complex>
#include <map>
#include <vector>

namespace qpres {

using cplx = std::complex<double>;

// Finite Fourier series in the free phase beta0: sum_m c_m e^{i m beta0}.
// This is the coefficient ring for everything computed per order: multiplication
// is harmonic convolution, differentiation maps c_m -> i m c_m, evaluation is an
// exact finite sum.  The `real` flag records conjugate symmetry c_{-m} = c_m*
// and is propagated through the arithmetic.
class TrigPoly {
 public:
  TrigPoly() = default;

  static TrigPoly constant(cplx c);
  static TrigPoly harmonic(int m, cplx c);
  // cos(m beta0), sin(m beta0) as real trig polynomials
  static TrigPoly cosine(int m, double amp = 1.0);
  static TrigPoly sine(int m, double amp = 1.0);

  const std::map<int, cplx>& harmonics() const { return h_; }
  cplx coeff(int m) const;
  void set_coeff(int m, cplx v);
  bool real_flag() const { return real_; }
  void set_real_flag(bool r) { real_ = r; }

  bool is_zero() const { return h_.empty(); }
  int max_harmonic() const;

  TrigPoly& operator+=(const TrigPoly& o);
  TrigPoly& operator-=(const TrigPoly& o);
  friend TrigPoly operator+(TrigPoly a, const TrigPoly& b) { a += b; return a; }
  friend TrigPoly operator-(TrigPoly a, const TrigPoly& b) { a -= b; return a; }
  TrigPoly operator*(const TrigPoly& o) const;
  TrigPoly operator-() const { return scaled(-1.0); }

  TrigPoly scaled(cplx s) const;
  TrigPoly diff() const;
  TrigPoly diff(int p) const;
  TrigPoly conjugated() const;  // coefficients of conj(f) for real beta0
  // beta0 -> beta0 + delta, i.e. c_m -> c_m e^{i m delta}
  TrigPoly phase_shifted(double delta) const;
  // antiderivative in beta0 with zero mean; the m = 0 harmonic is dropped
  TrigPoly antiderivative() const;

  cplx eval(double beta0) const;
  double eval_real(double beta0) const;
  cplx mean() const { return coeff(0); }

  double l1_norm() const;       // sum_m |c_m|, an upper bound for the sup norm
  double max_abs_coeff() const;
  double reality_defect() const;  // max_m |c_{-m} - conj(c_m)|

  // remove coefficients with |c| <= drop (drop = 0 removes exact zeros only)
  void trim(double drop = 0.0);

  bool operator==(const TrigPoly& o) const { return h_ == o.h_; }

 private:
  std::map<int, cplx> h_;
  bool real_ = true;
};

double max_coeff_distance(const TrigPoly& a, const TrigPoly& b);

// Polynomial in (B - B0bar) with TrigPoly coefficients, ascending degree.
// Captures the joint (beta, B) dependence of one Fourier mode of the forcing.
class BPoly {
 public:
  BPoly() = default;
  explicit BPoly(std::vector<TrigPoly> coeffs) : c_(std::move(coeffs)) { shrink(); }
  static BPoly from_trig(TrigPoly t);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const TrigPoly& coeff(int j) const;
  TrigPoly& at(int j);  // grows the coefficient list on demand

  BPoly& operator+=(const BPoly& o);
  friend BPoly operator+(BPoly a, const BPoly& b) { a += b; return a; }
  BPoly operator*(const BPoly& o) const;
  BPoly operator-() const { return scaled(-1.0); }
  BPoly scaled(cplx s) const;
  BPoly scaled_trig(const TrigPoly& t) const;

  BPoly dB() const;     // formal d/dB: degree shifts down, times the degree
  BPoly dBeta() const;  // harmonic derivative of every coefficient
  BPoly dB(int q) const;
  BPoly dBeta(int p) const;

  // d^p_beta d^q_B P evaluated at B = B0bar, as a function of beta0
  TrigPoly jet(int p, int q) const;
  // value at B = B0bar + db, as a function of beta0
  TrigPoly eval_dB(double db) const;
  cplx eval(double beta0, double db) const;

  BPoly conjugated() const;
  double l1_norm() const;
  void trim(double drop = 0.0);

  bool operator==(const BPoly& o) const { return c_ == o.c_; }

 private:
  void shrink();
  std::vector<TrigPoly> c_;
};

}  // namespace qpres
