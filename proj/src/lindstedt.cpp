#include "qpres/lindstedt.hpp"

#include <algorithm>
#include <cmath>

#include "qpres/parallel.hpp"

namespace qpres {

namespace {

constexpr cplx kI{0.0, 1.0};

using OrderSeries = std::vector<ModeTable>;  // index = order in eps

// C = A * B truncated at order kmax (mode convolution inside each order)
OrderSeries mul_trunc(const OrderSeries& A, const OrderSeries& B, int kmax) {
  OrderSeries C(kmax + 1);
  for (int i = 0; i < static_cast<int>(A.size()) && i <= kmax; ++i)
    for (int j = 0; j < static_cast<int>(B.size()) && i + j <= kmax; ++j)
      for (const auto& [nu1, t1] : A[i])
        for (const auto& [nu2, t2] : B[j]) {
          TrigPoly prod = t1 * t2;
          if (!prod.is_zero()) C[i + j][nu1 + nu2] += prod;
        }
  return C;
}

OrderSeries identity_series(int d, int kmax) {
  OrderSeries one(kmax + 1);
  one[0][Mode::zero(d)] = TrigPoly::constant(1.0);
  return one;
}

double fact(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

const TrigPoly& SolutionSeries::phi0(int k) const {
  static const TrigPoly zero{};
  const ModeTable& t = phi.at(k);
  if (t.empty()) return zero;
  auto it = t.find(Mode::zero(t.begin()->first.dim()));
  return it == t.end() ? zero : it->second;
}

const TrigPoly& SolutionSeries::gamma0(int k) const {
  static const TrigPoly zero{};
  if (gamma.at(k).empty()) return zero;
  auto it = gamma.at(k).find(Mode::zero(gamma.at(k).begin()->first.dim()));
  return it == gamma.at(k).end() ? zero : it->second;
}

TrigPoly SolutionSeries::Phi0(int k, const SystemSpec& spec) const {
  TrigPoly out = phi0(k);
  auto it = B.at(k).find(Mode::zero(spec.d));
  if (it != B.at(k).end()) out += it->second.scaled(spec.omega0_prime());
  return out;
}

void advance_order(const SystemSpec& spec, SolutionSeries& series, int k, double divisor_floor) {
  if (k < 1 || series.K != k - 1)
    throw Error(Error::Kind::precondition, "advance_order: orders must be computed in sequence");
  if (series.b.empty()) {
    series.b.resize(1);
    series.B.resize(1);
    series.phi.resize(1);
    series.gamma.resize(1);
  }
  const int d = spec.d;
  const Mode zero = Mode::zero(d);
  const double w0p = spec.omega0_prime();

  // powers of the partial sums: btilde^p and Btilde^q truncated at order k
  OrderSeries btilde(k), Btilde(k);
  for (int j = 1; j < k; ++j) {
    btilde[j] = series.b[j];
    Btilde[j] = series.B[j];
  }
  const int pmax = k - 1;
  const int qmax = std::max(k - 1, std::min(spec.omega0_degree(), k));
  std::vector<OrderSeries> Pb(pmax + 1), PB(qmax + 1);
  Pb[0] = identity_series(d, k);
  PB[0] = identity_series(d, k);
  for (int p = 1; p <= pmax; ++p) Pb[p] = mul_trunc(Pb[p - 1], btilde, k);
  for (int q = 1; q <= qmax; ++q) PB[q] = mul_trunc(PB[q - 1], Btilde, k);

  // [P(beta(t), B(t))]^{(k-1)} for P = F, G via the derivative expansion
  auto compose = [&](const ForcingField& P) {
    ModeTable out;
    std::vector<std::pair<int, int>> pq;
    for (int p = 0; p <= k - 1; ++p)
      for (int q = 0; p + q <= k - 1; ++q) pq.emplace_back(p, q);
    // mixed powers btilde^p Btilde^q at order k-1
    std::map<std::pair<int, int>, ModeTable> mixed;
    for (auto [p, q] : pq) {
      ModeTable m;
      for (int i = 0; i <= k - 1; ++i) {
        if (i >= static_cast<int>(Pb[p].size())) break;
        int j = k - 1 - i;
        if (j >= static_cast<int>(PB[q].size())) continue;
        for (const auto& [nu1, t1] : Pb[p][i])
          for (const auto& [nu2, t2] : PB[q][j]) {
            TrigPoly prod = t1 * t2;
            if (!prod.is_zero()) m[nu1 + nu2] += prod;
          }
      }
      mixed[{p, q}] = std::move(m);
    }
    // gather per target mode (independent, deterministic)
    std::map<Mode, int> targets;
    for (const auto& [nu0, tab] : P.table)
      for (const auto& [pqk, m] : mixed)
        for (const auto& [mu, t] : m) targets[nu0 + mu] = 1;
    std::vector<Mode> tv;
    tv.reserve(targets.size());
    for (const auto& [nu, x] : targets) tv.push_back(nu);
    std::vector<TrigPoly> slots(tv.size());
    par::for_each(tv.size(), [&](size_t idx) {
      const Mode& nu = tv[idx];
      TrigPoly acc;
      for (const auto& [nu0, poly] : P.table) {
        const Mode rest = nu - nu0;
        for (const auto& [pqk, m] : mixed) {
          auto it = m.find(rest);
          if (it == m.end()) continue;
          auto [p, q] = pqk;
          TrigPoly deriv = poly.jet(p, q);
          if (deriv.is_zero()) continue;
          acc += deriv * it->second.scaled(1.0 / (fact(p) * fact(q)));
        }
      }
      acc.trim();
      slots[idx] = std::move(acc);
    });
    for (size_t i = 0; i < tv.size(); ++i)
      if (!slots[i].is_zero()) out[tv[i]] = std::move(slots[i]);
    return out;
  };

  ModeTable gamma_k = compose(spec.G);
  ModeTable phi_k = compose(spec.F);
  // [U]^{(k)}: the s >= 2 Taylor remainder of omega0
  for (int s = 2; s <= std::min(spec.omega0_degree(), k); ++s) {
    const double cs = spec.omega0_poly[s];
    if (cs == 0.0 || s >= static_cast<int>(PB[s].size())) continue;
    for (const auto& [nu, t] : PB[s][k])
      if (!t.is_zero()) phi_k[nu] += t.scaled(cs);
  }
  for (auto* tab : {&gamma_k, &phi_k})
    for (auto it = tab->begin(); it != tab->end();) {
      it->second.trim();
      it = it->second.is_zero() ? tab->erase(it) : std::next(it);
    }

  ModeTable b_k, B_k;
  for (const auto& [nu, g] : gamma_k) {
    if (nu.is_zero()) continue;
    const double x = dot(spec.omega, nu);
    if (divisor_floor > 0.0 && std::abs(x) < divisor_floor)
      series.small_divisor_flags.emplace_back(k, nu);
    const cplx div = kI * x;
    B_k[nu] = g.scaled(1.0 / div);
    b_k[nu] = g.scaled(w0p / (div * div));
  }
  for (const auto& [nu, p] : phi_k) {
    if (nu.is_zero()) continue;
    const double x = dot(spec.omega, nu);
    const cplx div = kI * x;
    b_k[nu] += p.scaled(1.0 / div);
  }
  {
    auto it = phi_k.find(zero);
    if (it != phi_k.end()) B_k[zero] = it->second.scaled(-1.0 / w0p);
  }
  for (auto* tab : {&b_k, &B_k})
    for (auto it = tab->begin(); it != tab->end();) {
      it->second.trim();
      it = it->second.is_zero() ? tab->erase(it) : std::next(it);
    }

  series.b.push_back(std::move(b_k));
  series.B.push_back(std::move(B_k));
  series.phi.push_back(std::move(phi_k));
  series.gamma.push_back(std::move(gamma_k));
  series.K = k;
}

SolutionSeries compute_series(const SystemSpec& spec, int K, double divisor_floor) {
  SolutionSeries s;
  for (int k = 1; k <= K; ++k) advance_order(spec, s, k, divisor_floor);
  return s;
}

double range_residual(const SolutionSeries& series, const SystemSpec& spec, int k) {
  const double w0p = spec.omega0_prime();
  double scale = 0.0;
  auto bump = [&scale](const ModeTable& t) {
    for (const auto& [nu, p] : t) scale = std::max(scale, p.max_abs_coeff());
  };
  bump(series.b.at(k));
  bump(series.B.at(k));
  bump(series.phi.at(k));
  bump(series.gamma.at(k));
  if (scale == 0.0) return 0.0;

  double defect = 0.0;
  for (const auto& [nu, bk] : series.b.at(k)) {
    const cplx div = kI * dot(spec.omega, nu);
    // (i omega.nu) b - phi - omega0' B = 0
    TrigPoly r = bk.scaled(div);
    auto itp = series.phi.at(k).find(nu);
    if (itp != series.phi.at(k).end()) r -= itp->second;
    auto itB = series.B.at(k).find(nu);
    if (itB != series.B.at(k).end()) r -= itB->second.scaled(w0p);
    defect = std::max(defect, r.max_abs_coeff());
  }
  for (const auto& [nu, Bk] : series.B.at(k)) {
    if (nu.is_zero()) continue;
    // (i omega.nu) B - Gamma = 0
    TrigPoly r = Bk.scaled(kI * dot(spec.omega, nu));
    auto itg = series.gamma.at(k).find(nu);
    if (itg != series.gamma.at(k).end()) r -= itg->second;
    defect = std::max(defect, r.max_abs_coeff());
  }
  return defect / scale;
}

namespace {

double eval_deriv(const TrigPoly& g, int j, double x) { return g.diff(j).eval_real(x); }

double refine_root(const TrigPoly& g, double lo, double hi) {
  // bisection on the sign change, polished by Newton
  double flo = g.eval_real(lo), fhi = g.eval_real(hi);
  double a = lo, b = hi;
  for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
    double mid = 0.5 * (a + b), fm = g.eval_real(mid);
    if ((fm < 0) == (flo < 0)) {
      a = mid;
      flo = fm;
    } else {
      b = mid;
      fhi = fm;
    }
  }
  double x = 0.5 * (a + b);
  const TrigPoly dg = g.diff();
  for (int it = 0; it < 60; ++it) {
    double f = g.eval_real(x), df = dg.eval_real(x);
    if (df == 0.0) break;
    double step = f / df;
    x -= step;
    if (std::abs(step) < 1e-16) break;
  }
  return x;
}

double wrap_2pi(double x) {
  const double twopi = 2.0 * M_PI;
  x = std::fmod(x, twopi);
  if (x < 0) x += twopi;
  if (std::abs(x - twopi) < 1e-12) x = 0.0;
  return x;
}

}  // namespace

MelnikovReport melnikov(const SolutionSeries& series, const SystemSpec& spec) {
  MelnikovReport rep;
  double maxnorm = 0.0;
  for (int k = 1; k <= series.K; ++k) maxnorm = std::max(maxnorm, series.gamma0(k).l1_norm());
  if (maxnorm < 1e-14) {
    rep.all_zero = true;
    return rep;
  }
  const double order_floor = 1e-9 * maxnorm;
  for (int k = 1; k <= series.K; ++k)
    if (series.gamma0(k).l1_norm() > order_floor) {
      rep.k0 = k;
      break;
    }
  rep.gamma_k0 = series.gamma0(rep.k0);
  TrigPoly g = rep.gamma_k0;
  if (g.reality_defect() > 1e-12)
    throw Error(Error::Kind::reality, "Melnikov function is not real");

  const int N = 8192;
  double sup = 0.0;
  std::vector<double> vals(N + 1);
  for (int i = 0; i <= N; ++i) {
    vals[i] = g.eval_real(2.0 * M_PI * i / N);
    sup = std::max(sup, std::abs(vals[i]));
  }
  rep.tol_zero = 1e-9 * sup;
  rep.tol_order = 1e-6 * sup;

  std::vector<double> roots;
  auto push_root = [&](double r) {
    r = wrap_2pi(r);
    for (double q : roots)
      if (std::abs(wrap_2pi(r - q + M_PI) - M_PI) < 1e-6) return;
    roots.push_back(r);
  };
  for (int i = 0; i < N; ++i) {
    double x0 = 2.0 * M_PI * i / N, x1 = 2.0 * M_PI * (i + 1) / N;
    if (vals[i] == 0.0) push_root(x0);
    if ((vals[i] < 0) != (vals[i + 1] < 0)) push_root(refine_root(g, x0, x1));
  }
  // even-order zeros: local minima of |g| that dip below tol_zero
  const TrigPoly dg = g.diff();
  for (int i = 0; i < N; ++i) {
    int im = (i + N - 1) % N;
    int ip = (i + 1) % N;
    if (std::abs(vals[i]) < rep.tol_zero && std::abs(vals[i]) <= std::abs(vals[im]) &&
        std::abs(vals[i]) <= std::abs(vals[ip])) {
      // polish on g' (the zero of g coincides with a critical point)
      double x = 2.0 * M_PI * i / N;
      const TrigPoly ddg = dg.diff();
      for (int it = 0; it < 50; ++it) {
        double f = dg.eval_real(x), df = ddg.eval_real(x);
        if (df == 0.0) break;
        x -= f / df;
      }
      if (std::abs(g.eval_real(x)) < rep.tol_zero) push_root(x);
    }
  }
  std::sort(roots.begin(), roots.end());

  for (double r : roots) {
    MelnikovZero z;
    z.beta0 = r;
    for (int j = 1; j <= g.max_harmonic() + 2; ++j) {
      double dj = eval_deriv(g, j, r);
      if (std::abs(dj) > rep.tol_order) {
        z.order = j;
        z.leading_derivative = dj;
        break;
      }
    }
    if (z.order == 0) continue;  // flat to the resolution of the table
    z.odd_order = (z.order % 2) == 1;
    if (z.odd_order) {
      const double s = spec.omega0_prime() * z.leading_derivative;
      if (rep.k0 % 2 == 0)
        z.eps_sign = s > 0 ? 2 : 0;  // eps^k0 > 0 for both signs
      else
        z.eps_sign = s > 0 ? 1 : -1;
    }
    rep.zeros.push_back(z);
  }
  return rep;
}

GradientCheck gradient_structure_check(const SolutionSeries& series, const SystemSpec& spec) {
  GradientCheck out;
  out.hamiltonian = spec.hamiltonian();
  MelnikovReport rep = melnikov(series, spec);
  out.all_zero = rep.all_zero;
  if (rep.all_zero) return out;
  out.k0 = rep.k0;
  out.mean_defect = std::abs(rep.gamma_k0.mean());
  out.primitive = rep.gamma_k0.antiderivative();
  return out;
}

namespace {

using FreeTable = std::map<Mode, BPoly>;
using FreeOrderSeries = std::vector<FreeTable>;

FreeOrderSeries mul_trunc_free(const FreeOrderSeries& A, const FreeOrderSeries& B, int kmax) {
  FreeOrderSeries C(kmax + 1);
  for (int i = 0; i < static_cast<int>(A.size()) && i <= kmax; ++i)
    for (int j = 0; j < static_cast<int>(B.size()) && i + j <= kmax; ++j)
      for (const auto& [nu1, t1] : A[i])
        for (const auto& [nu2, t2] : B[j]) {
          BPoly prod = t1 * t2;
          if (!prod.is_zero()) C[i + j][nu1 + nu2] += prod;
        }
  return C;
}

}  // namespace

FreeSeries compute_free_series(const SystemSpec& spec, int K) {
  FreeSeries out;
  out.K = K;
  const int d = spec.d;
  const Mode zero = Mode::zero(d);
  out.b.resize(K + 1);
  out.B.resize(K + 1);
  // omega0 and its scaled derivatives as polynomials in (B0 - B0bar)
  auto omega0_jet = [&](int s) {  // (1/s!) d^s omega0, as a BPoly
    BPoly p;
    for (int j = s; j <= spec.omega0_degree(); ++j) {
      double binom = 1.0;
      for (int i = 0; i < s; ++i) binom *= double(j - i) / double(s - i);
      double c = spec.omega0_poly[j] * binom;
      if (c != 0.0) p.at(j - s) += TrigPoly::constant(c);
    }
    return p;
  };
  out.Phi0.push_back(omega0_jet(0));
  out.Gamma0.push_back(BPoly{});

  for (int k = 1; k <= K; ++k) {
    FreeOrderSeries btilde(k), Btilde(k);
    for (int j = 1; j < k; ++j) {
      btilde[j] = out.b[j];
      Btilde[j] = out.B[j];
    }
    const int pmax = k - 1;
    const int qmax = std::max(k - 1, std::min(spec.omega0_degree(), k));
    std::vector<FreeOrderSeries> Pb(pmax + 1), PB(qmax + 1);
    Pb[0].assign(k + 1, FreeTable{});
    Pb[0][0][zero] = BPoly::from_trig(TrigPoly::constant(1.0));
    PB[0] = Pb[0];
    for (int p = 1; p <= pmax; ++p) Pb[p] = mul_trunc_free(Pb[p - 1], btilde, k);
    for (int q = 1; q <= qmax; ++q) PB[q] = mul_trunc_free(PB[q - 1], Btilde, k);

    auto compose = [&](const ForcingField& P) {
      FreeTable acc;
      for (int p = 0; p <= k - 1; ++p)
        for (int q = 0; p + q <= k - 1; ++q) {
          const double inv = 1.0 / (fact(p) * fact(q));
          // mixed power at order k-1
          FreeTable mixed;
          for (int i = 0; i <= k - 1; ++i) {
            if (i >= static_cast<int>(Pb[p].size())) break;
            int j = k - 1 - i;
            if (j >= static_cast<int>(PB[q].size())) continue;
            for (const auto& [nu1, t1] : Pb[p][i])
              for (const auto& [nu2, t2] : PB[q][j]) {
                BPoly prod = t1 * t2;
                if (!prod.is_zero()) mixed[nu1 + nu2] += prod;
              }
          }
          if (mixed.empty()) continue;
          for (const auto& [nu0, poly] : P.table) {
            BPoly deriv = poly.dB(q).dBeta(p).scaled(inv);
            if (deriv.is_zero()) continue;
            for (const auto& [mu, t] : mixed) {
              BPoly prod = deriv * t;
              if (!prod.is_zero()) acc[nu0 + mu] += prod;
            }
          }
        }
      return acc;
    };

    FreeTable gamma_k = compose(spec.G);
    FreeTable phi_k = compose(spec.F);
    // full omega0 Taylor sum, s >= 1 (B0 is free, so the linear term stays)
    for (int s = 1; s <= std::min(spec.omega0_degree(), k); ++s) {
      BPoly cs = omega0_jet(s);
      if (cs.is_zero() || s >= static_cast<int>(PB[s].size())) continue;
      for (const auto& [nu, t] : PB[s][k]) {
        BPoly prod = cs * t;
        if (!prod.is_zero()) phi_k[nu] += prod;
      }
    }

    for (const auto& [nu, g] : gamma_k) {
      if (nu.is_zero()) continue;
      const cplx div = kI * dot(spec.omega, nu);
      out.B[k][nu] = g.scaled(1.0 / div);
    }
    for (const auto& [nu, p] : phi_k) {
      if (nu.is_zero()) continue;
      const cplx div = kI * dot(spec.omega, nu);
      out.b[k][nu] += p.scaled(1.0 / div);
    }
    auto itp = phi_k.find(zero);
    out.Phi0.push_back(itp == phi_k.end() ? BPoly{} : itp->second);
    auto itg = gamma_k.find(zero);
    out.Gamma0.push_back(itg == gamma_k.end() ? BPoly{} : itg->second);
  }
  return out;
}

}  // namespace qpres
