#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpres/trig.hpp"

namespace qpres {

struct Error : std::runtime_error {
  enum class Kind {
    parse,
    normalization,   // omega0(B0bar) != 0
    anisochrony,     // omega0'(B0bar) == 0
    reality,         // conjugate-mode symmetry broken
    hamiltonian,     // stored F/G disagree with derivatives of f
    resonance,       // rationally dependent frequency vector
    budget,          // lattice search / tree count cap exceeded
    singular,        // near-singular propagator inversion
    no_root,         // bifurcation solve found no root in the trust interval
    step_size,       // integrator step does not resolve the fastest mode
    precondition,
    io,
  };
  Error(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
  Kind kind;
};

// Integer lattice vector nu in Z^d; |nu| is the l1 norm throughout.
struct Mode {
  std::vector<int> e;

  Mode() = default;
  explicit Mode(std::vector<int> v) : e(std::move(v)) {}
  static Mode zero(int d) { return Mode(std::vector<int>(d, 0)); }
  static Mode unit(int d, int axis);

  int dim() const { return static_cast<int>(e.size()); }
  int l1() const;
  bool is_zero() const;
  Mode operator-() const;
  Mode operator+(const Mode& o) const;
  Mode operator-(const Mode& o) const;
  bool operator==(const Mode& o) const { return e == o.e; }
  bool operator<(const Mode& o) const { return e < o.e; }
  std::string str() const;
};

double dot(const std::vector<double>& omega, const Mode& nu);

// Truncated Fourier table of a real-valued forcing function: one BPoly per
// retained mode, with the reality condition P_{-nu} = conj(P_nu).
struct ForcingField {
  std::map<Mode, BPoly> table;

  bool empty() const { return table.empty(); }
  const BPoly& at(const Mode& nu) const;
  double reality_defect() const;
  std::vector<Mode> support() const;
  int max_mode_l1() const;
};

// (F, G) = (d_B f, -d_beta f), coefficient-wise
std::pair<ForcingField, ForcingField> derive_forcing_from_hamiltonian(const ForcingField& f);

struct Truncation {
  int N_modes = 1;
  int M_beta = 1;
  int D_B = 0;
};

struct SystemSpec {
  int d = 0;
  std::vector<double> omega;
  std::vector<std::string> omega_strings;  // original decimal/surd spellings
  double B0bar = 0.0;
  std::vector<double> omega0_poly;  // ascending degree in (B - B0bar)
  ForcingField F, G;
  std::optional<ForcingField> f;  // Hamiltonian density, when given
  Truncation trunc;

  bool hamiltonian() const { return f.has_value(); }
  double omega0(double B) const;
  double omega0_prime() const { return omega0_poly.size() > 1 ? omega0_poly[1] : 0.0; }
  // s! * (coefficient of (B-B0bar)^s), i.e. d^s omega0 at B0bar
  double omega0_deriv(int s) const;
  int omega0_degree() const { return static_cast<int>(omega0_poly.size()) - 1; }
  std::vector<Mode> forcing_support() const;  // union of F and G supports
  void validate() const;
};

// Frequency entries are decimal strings, optionally quadratic surds of the
// form (p + q*sqrt(r))/s; evaluated in long double before rounding.
double parse_frequency(const std::string& text);

SystemSpec load_spec(const std::string& path);
SystemSpec parse_spec(const std::string& json_text);
std::string save_spec(const SystemSpec& spec);

}  // namespace qpres
