#pragma once

#include <map>
#include <utility>
#include <vector>

#include "qpres/model.hpp"

namespace qpres {

using ModeTable = std::map<Mode, TrigPoly>;

// Per-order, per-mode coefficient tables of the formal solution series.
// Order k lives at index k; index 0 is unused.
struct SolutionSeries {
  int K = 0;
  std::vector<ModeTable> b;      // b^(k)_nu, nu != 0
  std::vector<ModeTable> B;      // B^(k)_nu, including nu = 0
  std::vector<ModeTable> phi;    // phi^(k)_nu = [U]^(k) + [F]^(k-1)
  std::vector<ModeTable> gamma;  // Gamma^(k)_nu = [G]^(k-1)
  std::vector<std::pair<int, Mode>> small_divisor_flags;

  const TrigPoly& phi0(int k) const;
  const TrigPoly& gamma0(int k) const;
  // Phi^(k)_0 = phi^(k)_0 + omega0'(B0bar) B^(k)_0; identically zero in this
  // parameterisation since B^(k)_0 is chosen to cancel phi^(k)_0
  TrigPoly Phi0(int k, const SystemSpec& spec) const;
};

// One step of the recursion; orders 1..k-1 must already be present.
// Coefficients with |omega.nu| below divisor_floor are still computed exactly
// but flagged for the conditioning report.
void advance_order(const SystemSpec& spec, SolutionSeries& series, int k,
                   double divisor_floor = 0.0);
SolutionSeries compute_series(const SystemSpec& spec, int K, double divisor_floor = 0.0);

// max over modes and harmonics of the order-k range-equation defect,
// relative to the order's coefficient scale
double range_residual(const SolutionSeries& series, const SystemSpec& spec, int k);

struct MelnikovZero {
  double beta0 = 0.0;
  int order = 0;  // smallest j with |d^j Gamma(beta0)| > tol_order
  double leading_derivative = 0.0;
  bool odd_order = false;
  // signs of eps with eps^k0 omega0' d^n Gamma > 0: +1 / -1 / 0 (none) / 2 (both)
  int eps_sign = 0;
};

struct MelnikovReport {
  int k0 = 0;  // first order with Gamma^(k)_0 not identically zero; 0 if none
  bool all_zero = false;
  TrigPoly gamma_k0;
  std::vector<MelnikovZero> zeros;
  double tol_zero = 0.0;
  double tol_order = 0.0;
};

MelnikovReport melnikov(const SolutionSeries& series, const SystemSpec& spec);

struct GradientCheck {
  bool hamiltonian = false;
  bool all_zero = false;
  int k0 = 0;
  double mean_defect = 0.0;  // |m=0 harmonic| of Gamma^(k0)_0
  TrigPoly primitive;        // g with Gamma^(k0)_0 = d g / d beta0, zero mean
};

GradientCheck gradient_structure_check(const SolutionSeries& series, const SystemSpec& spec);

// The range-equation expansion with B0 kept as a free parameter: coefficients
// are polynomials in (B0 - B0bar).  Feeds the order-by-order Jacobian identity
// of the self-energy module.
struct FreeSeries {
  int K = 0;
  std::vector<std::map<Mode, BPoly>> b;  // b^{k}_nu, nu != 0
  std::vector<std::map<Mode, BPoly>> B;
  std::vector<BPoly> Phi0;    // k = 0..K, Phi0[0] = omega0(B0)
  std::vector<BPoly> Gamma0;  // k = 0..K, Gamma0[0] = 0
};

FreeSeries compute_free_series(const SystemSpec& spec, int K);

}  // namespace qpres
