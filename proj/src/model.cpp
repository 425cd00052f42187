#include "qpres/model.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qpres {

using nlohmann::json;

Mode Mode::unit(int d, int axis) {
  Mode m = zero(d);
  m.e[axis] = 1;
  return m;
}

int Mode::l1() const {
  int s = 0;
  for (int v : e) s += std::abs(v);
  return s;
}

bool Mode::is_zero() const {
  for (int v : e)
    if (v != 0) return false;
  return true;
}

Mode Mode::operator-() const {
  Mode m = *this;
  for (int& v : m.e) v = -v;
  return m;
}

Mode Mode::operator+(const Mode& o) const {
  Mode m = *this;
  for (size_t i = 0; i < e.size(); ++i) m.e[i] += o.e[i];
  return m;
}

Mode Mode::operator-(const Mode& o) const {
  Mode m = *this;
  for (size_t i = 0; i < e.size(); ++i) m.e[i] -= o.e[i];
  return m;
}

std::string Mode::str() const {
  std::string s = "(";
  for (size_t i = 0; i < e.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(e[i]);
  }
  return s + ")";
}

double dot(const std::vector<double>& omega, const Mode& nu) {
  double s = 0.0;
  for (size_t i = 0; i < omega.size(); ++i) s += omega[i] * nu.e[i];
  return s;
}

const BPoly& ForcingField::at(const Mode& nu) const {
  static const BPoly zero{};
  auto it = table.find(nu);
  return it == table.end() ? zero : it->second;
}

double ForcingField::reality_defect() const {
  double d = 0.0;
  for (const auto& [nu, p] : table) {
    const BPoly conj = at(-nu).conjugated();
    for (int j = 0; j <= std::max(p.degree(), conj.degree()); ++j)
      d = std::max(d, max_coeff_distance(p.coeff(j), conj.coeff(j)));
  }
  return d;
}

std::vector<Mode> ForcingField::support() const {
  std::vector<Mode> out;
  out.reserve(table.size());
  for (const auto& [nu, p] : table) out.push_back(nu);
  return out;
}

int ForcingField::max_mode_l1() const {
  int m = 0;
  for (const auto& [nu, p] : table) m = std::max(m, nu.l1());
  return m;
}

std::pair<ForcingField, ForcingField> derive_forcing_from_hamiltonian(const ForcingField& f) {
  ForcingField F, G;
  for (const auto& [nu, p] : f.table) {
    BPoly dB = p.dB();
    BPoly mdBeta = p.dBeta().scaled(-1.0);
    if (!dB.is_zero()) F.table[nu] = std::move(dB);
    if (!mdBeta.is_zero()) G.table[nu] = std::move(mdBeta);
  }
  return {std::move(F), std::move(G)};
}

double SystemSpec::omega0(double B) const {
  double x = B - B0bar, p = 1.0, s = 0.0;
  for (double c : omega0_poly) {
    s += c * p;
    p *= x;
  }
  return s;
}

double SystemSpec::omega0_deriv(int s) const {
  if (s >= static_cast<int>(omega0_poly.size())) return 0.0;
  double fact = 1.0;
  for (int i = 2; i <= s; ++i) fact *= i;
  return omega0_poly[s] * fact;
}

std::vector<Mode> SystemSpec::forcing_support() const {
  std::map<Mode, int> seen;
  for (const auto& [nu, p] : F.table) seen[nu] = 1;
  for (const auto& [nu, p] : G.table) seen[nu] = 1;
  std::vector<Mode> out;
  for (const auto& [nu, x] : seen) out.push_back(nu);
  return out;
}

void SystemSpec::validate() const {
  if (d < 1 || static_cast<int>(omega.size()) != d)
    throw Error(Error::Kind::parse, "frequency vector does not match dimension d");
  if (std::abs(omega0(B0bar)) > 1e-12)
    throw Error(Error::Kind::normalization,
                "omega0(B0bar) must vanish (got " + std::to_string(omega0(B0bar)) + ")");
  if (std::abs(omega0_prime()) < 1e-10)
    throw Error(Error::Kind::anisochrony, "omega0'(B0bar) vanishes");
  const double rf = F.reality_defect(), rg = G.reality_defect();
  if (rf > 1e-13 || rg > 1e-13)
    throw Error(Error::Kind::reality, "forcing table breaks the conjugate-mode condition");
  if (f) {
    if (f->reality_defect() > 1e-13)
      throw Error(Error::Kind::reality, "hamiltonian table breaks the conjugate-mode condition");
    auto [dF, dG] = derive_forcing_from_hamiltonian(*f);
    auto same = [](const ForcingField& a, const ForcingField& b) {
      for (const auto& [nu, p] : a.table) {
        const BPoly& q = b.at(nu);
        for (int j = 0; j <= std::max(p.degree(), q.degree()); ++j)
          if (max_coeff_distance(p.coeff(j), q.coeff(j)) != 0.0) return false;
      }
      for (const auto& [nu, p] : b.table)
        if (a.table.find(nu) == a.table.end() && !p.is_zero()) return false;
      return true;
    };
    if (!same(F, dF) || !same(G, dG))
      throw Error(Error::Kind::hamiltonian, "stored F/G do not equal the derivatives of f");
  }
}

namespace {

// number := [+-]? digits [. digits]? ([eE][+-]?digits)?
bool parse_number(const std::string& s, size_t& i, long double& out) {
  size_t start = i;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  size_t digits = i;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  }
  if (i == digits) {
    i = start;
    return false;
  }
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    size_t j = i + 1;
    if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
    size_t k = j;
    while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
    if (k > j) i = k;
  }
  out = std::strtold(s.substr(start, i - start).c_str(), nullptr);
  return true;
}

// term := number ['*' sqrt] | sqrt ;  sqrt := "sqrt(" number ")"
bool parse_term(const std::string& s, size_t& i, long double& out) {
  long double coeff = 1.0;
  bool have_coeff = false;
  if (s.compare(i, 5, "sqrt(") != 0) {
    if (!parse_number(s, i, coeff)) return false;
    have_coeff = true;
    if (i < s.size() && s[i] == '*') ++i;
  } else if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
    coeff = (s[i] == '-') ? -1.0L : 1.0L;
    ++i;
  }
  if (s.compare(i, 5, "sqrt(") == 0) {
    i += 5;
    long double r;
    if (!parse_number(s, i, r) || i >= s.size() || s[i] != ')') return false;
    ++i;
    if (r < 0) return false;
    out = coeff * std::sqrt(r);
    return true;
  }
  if (!have_coeff) return false;
  out = coeff;
  return true;
}

// expr := term (('+'|'-') term)*
bool parse_expr(const std::string& s, size_t& i, long double& out) {
  long double acc;
  if (!parse_term(s, i, acc)) return false;
  while (i < s.size() && (s[i] == '+' || s[i] == '-')) {
    char op = s[i];
    size_t save = i;
    ++i;
    long double t;
    // a leading sign may belong to the next term's number; retry from the sign
    if (!parse_term(s, i, t)) {
      i = save;
      if (!parse_term(s, i, t)) return false;
      acc += t;
      continue;
    }
    acc += (op == '-') ? -t : t;
  }
  out = acc;
  return true;
}

}  // namespace

double parse_frequency(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw Error(Error::Kind::parse, "empty frequency entry");

  size_t i = 0;
  long double value;
  if (s[0] == '(') {
    size_t close = s.rfind(')');
    if (close == std::string::npos)
      throw Error(Error::Kind::parse, "unbalanced parenthesis in frequency '" + text + "'");
    std::string inner = s.substr(1, close - 1);
    size_t j = 0;
    if (!parse_expr(inner, j, value) || j != inner.size())
      throw Error(Error::Kind::parse, "cannot parse frequency '" + text + "'");
    i = close + 1;
  } else if (!parse_expr(s, i, value)) {
    throw Error(Error::Kind::parse, "cannot parse frequency '" + text + "'");
  }
  if (i < s.size()) {
    if (s[i] != '/') throw Error(Error::Kind::parse, "cannot parse frequency '" + text + "'");
    ++i;
    long double den;
    if (!parse_number(s, i, den) || i != s.size() || den == 0.0L)
      throw Error(Error::Kind::parse, "bad denominator in frequency '" + text + "'");
    value /= den;
  }
  return static_cast<double>(value);
}

namespace {

ForcingField field_from_json(const json& arr, int d, const Truncation& tr, const char* name) {
  ForcingField out;
  for (const auto& rec : arr) {
    if (!rec.contains("nu") || !rec.contains("m") || !rec.contains("b_coeffs"))
      throw Error(Error::Kind::parse, std::string(name) + ": record needs nu, m, b_coeffs");
    std::vector<int> nu = rec.at("nu").get<std::vector<int>>();
    if (static_cast<int>(nu.size()) != d)
      throw Error(Error::Kind::parse, std::string(name) + ": nu has wrong dimension");
    Mode mode(nu);
    if (mode.l1() > tr.N_modes)
      throw Error(Error::Kind::parse, std::string(name) + ": |nu| exceeds truncation N_modes");
    int m = rec.at("m").get<int>();
    if (std::abs(m) > tr.M_beta)
      throw Error(Error::Kind::parse, std::string(name) + ": |m| exceeds truncation M_beta");
    const auto& bc = rec.at("b_coeffs");
    if (static_cast<int>(bc.size()) > tr.D_B + 1)
      throw Error(Error::Kind::parse, std::string(name) + ": B degree exceeds truncation D_B");
    BPoly& p = out.table[mode];
    for (size_t j = 0; j < bc.size(); ++j) {
      if (bc[j].size() != 2)
        throw Error(Error::Kind::parse, std::string(name) + ": complex entries are [re, im]");
      cplx c(bc[j][0].get<double>(), bc[j][1].get<double>());
      if (c != 0.0) {
        TrigPoly& t = p.at(static_cast<int>(j));
        t.set_coeff(m, t.coeff(m) + c);
        t.set_real_flag(false);
      }
    }
  }
  // per-coefficient reality flags: set once the whole table is assembled
  for (auto& [nu, p] : out.table) {
    for (int j = 0; j <= p.degree(); ++j) {
      TrigPoly t = p.coeff(j);
      t.set_real_flag(t.reality_defect() == 0.0);
      p.at(j) = t;
    }
    p.trim();
  }
  for (auto it = out.table.begin(); it != out.table.end();)
    it = it->second.is_zero() ? out.table.erase(it) : std::next(it);
  return out;
}

json field_to_json(const ForcingField& f) {
  json arr = json::array();
  for (const auto& [nu, p] : f.table) {
    std::map<int, std::vector<cplx>> rows;  // m -> B coefficients
    for (int j = 0; j <= p.degree(); ++j)
      for (const auto& [m, c] : p.coeff(j).harmonics()) {
        auto& row = rows[m];
        if (static_cast<int>(row.size()) <= j) row.resize(j + 1);
        row[j] = c;
      }
    for (const auto& [m, row] : rows) {
      json bc = json::array();
      for (const cplx& c : row) bc.push_back({c.real(), c.imag()});
      arr.push_back({{"nu", nu.e}, {"m", m}, {"b_coeffs", bc}});
    }
  }
  return arr;
}

}  // namespace

SystemSpec parse_spec(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw Error(Error::Kind::parse, std::string("invalid JSON: ") + e.what());
  }
  SystemSpec s;
  try {
    s.d = j.at("d").get<int>();
    for (const auto& w : j.at("omega")) {
      if (w.is_string())
        s.omega_strings.push_back(w.get<std::string>());
      else
        s.omega_strings.push_back(w.dump());
      s.omega.push_back(parse_frequency(s.omega_strings.back()));
    }
    s.B0bar = j.at("B0bar").get<double>();
    s.omega0_poly = j.at("omega0_poly").get<std::vector<double>>();
    if (j.contains("truncation")) {
      const auto& t = j.at("truncation");
      s.trunc.N_modes = t.value("N_modes", 1);
      s.trunc.M_beta = t.value("M_beta", 1);
      s.trunc.D_B = t.value("D_B", 0);
    }
    if (j.contains("f")) s.f = field_from_json(j.at("f"), s.d, s.trunc, "f");
    if (j.contains("F")) s.F = field_from_json(j.at("F"), s.d, s.trunc, "F");
    if (j.contains("G")) s.G = field_from_json(j.at("G"), s.d, s.trunc, "G");
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(Error::Kind::parse, std::string("bad model file: ") + e.what());
  }
  if (s.f) {
    auto [dF, dG] = derive_forcing_from_hamiltonian(*s.f);
    bool had_FG = !s.F.empty() || !s.G.empty();
    if (!had_FG) {
      s.F = std::move(dF);
      s.G = std::move(dG);
    }
  }
  s.validate();
  return s;
}

SystemSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Error::Kind::io, "cannot open model file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str());
}

std::string save_spec(const SystemSpec& spec) {
  json j;
  j["d"] = spec.d;
  j["omega"] = spec.omega_strings;
  j["B0bar"] = spec.B0bar;
  j["omega0_poly"] = spec.omega0_poly;
  j["truncation"] = {{"N_modes", spec.trunc.N_modes},
                     {"M_beta", spec.trunc.M_beta},
                     {"D_B", spec.trunc.D_B}};
  if (spec.f)
    j["f"] = field_to_json(*spec.f);
  else {
    j["F"] = field_to_json(spec.F);
    j["G"] = field_to_json(spec.G);
  }
  return j.dump(2);
}

}  // namespace qpres
