#pragma once

#include <limits>
#include <vector>

#include "qpres/model.hpp"

namespace qpres {

// Exact minimum of |omega . nu| over integer nu with 0 < |nu|_1 <= radius.
// The production kernel enumerates the lattice over d-1 coordinates and solves
// the remaining coordinate in closed form (the dot product is V-shaped in it),
// which is exact and O(radius^{d-1}); the full-ball scan is kept as the serial
// reference.  Both raise a resonance error when |omega . nu| < 1e-14 (1 + |nu|).
double alpha_min(const std::vector<double>& omega, long radius);
double alpha_min_bruteforce(const std::vector<double>& omega, long radius);

// alpha_n of the Bryuno sequence: radius 2^n, budget on the radius itself.
double alpha_n(const std::vector<double>& omega, int n, long budget_radius = 1L << 20);

struct ScaleProfile {
  std::vector<double> omega;
  int N_profile = 0;
  std::vector<double> alphas;           // alpha_j for raw index j (as far as computed)
  std::vector<int> m_seq;               // m_0 = 0, m_{n+1} = m_n + p_n + 1
  std::vector<int> p_seq;               // p_n = max{q >= 0 : alpha_{m_n} < 2 alpha_{m_n+q}}
  std::vector<double> bryuno_partials;  // sum_{j<=n} 2^{-j} log(1/alpha_j)

  double alpha(int j) const { return alphas.at(j); }
  // alpha_{m_n}; n = -1 reads as +infinity
  double alpha_m(int n) const {
    return n < 0 ? std::numeric_limits<double>::infinity() : alphas.at(m_seq.at(n));
  }
  void check_invariants() const;  // monotonicity of the sequences
};

ScaleProfile build_profile(const std::vector<double>& omega, int N_profile,
                           long budget_radius = 1L << 20);

// The C-infinity cutoff family of the multiscale decomposition.  chi is the
// standard bump quotient chi(x) = g(2-2|x|) / (g(2-2|x|) + g(2|x|-1)) with
// g(s) = e^{-1/s} for s > 0 and 0 otherwise; it is 1 for |x| <= 1/2 and 0 for
// |x| >= 1.  xi is the one-sided variant used by the regularised propagators.
class Cutoffs {
 public:
  explicit Cutoffs(const ScaleProfile& prof) : prof_(&prof) {}

  static double chi(double x);
  static double xi(double x);

  // chi_{-1} = 1; chi_n(x) = chi(8x / alpha_{m_n})
  double chi_n(int n, double x) const;
  double psi_n(int n, double x) const { return 1.0 - chi_n(n, x); }
  // Psi_n = chi_{n-1} psi_n for n >= 0 (so Psi_0 = psi_0)
  double Psi_n(int n, double x) const;
  // xi_{-1} = 1; xi_n(x) = xi(2^8 x / alpha_{m_{n+1}}^2)
  double xi_n(int n, double x) const;

  // partial sum psi_p + sum_{n=p+1}^{N} Psi_n; equals 1 - chi_N(x)
  double partition_sum(int p, double x) const;

  // scales n in [0, N_profile] with Psi_n(x) != 0 (at most two)
  std::vector<int> admissible_scales(double x) const;
  // smallest such scale; throws a budget error when x is below the resolved band
  int min_scale(double x) const;

  const ScaleProfile& profile() const { return *prof_; }

 private:
  const ScaleProfile* prof_;
};

}  // namespace qpres
