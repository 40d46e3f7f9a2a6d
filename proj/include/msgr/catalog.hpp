#pragma once

// Metric descriptions: built-in exact spacetimes and a small text format
// for user-defined ones. Every component is an Expression, so builtins and
// files go through the same evaluation path.

#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "msgr/errors.hpp"
#include "msgr/expression.hpp"
#include "msgr/geometry.hpp"
#include "msgr/indexing.hpp"
#include "msgr/jet_space.hpp"
#include "msgr/taylor.hpp"

namespace msgr {

enum class Vacuum { Yes, No, Unknown };

inline const char* to_string(Vacuum v) {
  switch (v) {
    case Vacuum::Yes: return "yes";
    case Vacuum::No: return "no";
    case Vacuum::Unknown: return "unknown";
  }
  return "unknown";
}

using DomainBox = std::array<std::array<double, 2>, 4>;

struct MetricSpec {
  std::string name;
  std::string description;
  std::array<Expression, 10> components;  // ordered pairs a <= b
  std::map<std::string, double> params;
  DomainBox box{{{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}}};
  Vacuum vacuum = Vacuum::Unknown;
  std::map<int, Expression> connection;  // Gamma^l_mn overrides at 16 l + 4 m + n

  bool has_connection_override() const { return !connection.empty(); }

  const Expression& component(int a, int b) const { return components[static_cast<std::size_t>(pair_index(a, b))]; }

  bool contains(const BasePoint& x) const {
    for (std::size_t i = 0; i < 4; ++i) {
      const double slack = 1e-12 * (1.0 + std::abs(box[i][0]) + std::abs(box[i][1]));
      if (!(x[i] >= box[i][0] - slack && x[i] <= box[i][1] + slack)) return false;
    }
    return true;
  }

  std::array<std::array<double, 4>, 4> metric_value(const BasePoint& x) const {
    std::array<std::array<double, 4>, 4> g{};
    for (int p = 0; p < 10; ++p) {
      const auto [a, b] = pair_of(p);
      const double v = components[static_cast<std::size_t>(p)].evaluate<double>(x, params);
      g[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = v;
      g[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = v;
    }
    return g;
  }
};

/// Spot-check a 3^4 grid of the box (corners, edge midpoints, centre) for a
/// nondegenerate Lorentzian metric. Throws ConfigError otherwise.
inline void validate(const MetricSpec& spec) {
  for (std::size_t i = 0; i < 4; ++i) {
    if (!(spec.box[i][0] <= spec.box[i][1])) {
      throw ConfigError("metric '" + spec.name + "': empty domain interval for x" + std::to_string(i));
    }
  }
  for (int k = 0; k < 81; ++k) {
    BasePoint x{};
    int r = k;
    for (std::size_t i = 0; i < 4; ++i) {
      const double t = 0.5 * (r % 3);
      r /= 3;
      x[i] = spec.box[i][0] + t * (spec.box[i][1] - spec.box[i][0]);
    }
    try {
      require_lorentzian(spec.metric_value(x));
    } catch (const NumericError& e) {
      std::ostringstream os;
      os << "metric '" << spec.name << "' is not a nondegenerate Lorentzian metric at (" << x[0] << ", " << x[1]
         << ", " << x[2] << ", " << x[3] << "): " << e.what();
      throw ConfigError(os.str());
    }
  }
}

namespace detail {

inline std::set<std::string> keys(const std::map<std::string, double>& m) {
  std::set<std::string> s;
  for (const auto& [k, v] : m) s.insert(k);
  return s;
}

inline MetricSpec diagonal_spec(std::string name, std::string description, std::map<std::string, double> params,
                                const std::array<std::string, 4>& diag, DomainBox box, Vacuum vacuum) {
  MetricSpec s;
  s.name = std::move(name);
  s.description = std::move(description);
  s.params = std::move(params);
  const auto names = keys(s.params);
  for (int a = 0; a < 4; ++a) {
    s.components[static_cast<std::size_t>(pair_index(a, a))] = parse_expression(diag[static_cast<std::size_t>(a)], names);
  }
  s.box = box;
  s.vacuum = vacuum;
  return s;
}

inline double param_or(const std::map<std::string, double>& p, const std::string& key, double fallback) {
  const auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

inline void check_param_names(const std::string& metric, const std::map<std::string, double>& given,
                              const std::set<std::string>& allowed) {
  for (const auto& [k, v] : given) {
    if (allowed.count(k) == 0) throw ConfigError("metric '" + metric + "' has no parameter '" + k + "'");
  }
}

}  // namespace detail

struct BuiltinMetric {
  std::string name;
  std::string summary;
  std::function<MetricSpec(const std::map<std::string, double>&)> make;
};

inline const std::vector<BuiltinMetric>& builtin_metrics() {
  using detail::check_param_names;
  using detail::diagonal_spec;
  using detail::param_or;
  static const std::vector<BuiltinMetric> list{
      {"minkowski", "flat spacetime, Cartesian chart",
       [](const std::map<std::string, double>& p) {
         check_param_names("minkowski", p, {});
         return diagonal_spec("minkowski", "flat spacetime, Cartesian chart", {}, {"-1", "1", "1", "1"},
                              {{{-1, 1}, {-1, 1}, {-1, 1}, {-1, 1}}}, Vacuum::Yes);
       }},
      {"spherical-flat", "flat spacetime, spherical chart (t, r, theta, phi)",
       [](const std::map<std::string, double>& p) {
         check_param_names("spherical-flat", p, {});
         return diagonal_spec("spherical-flat", "flat spacetime, spherical chart (t, r, theta, phi)", {},
                              {"-1", "1", "x1^2", "x1^2*sin(x2)^2"}, {{{-1, 1}, {1, 5}, {0.3, 2.8}, {-1, 1}}},
                              Vacuum::Yes);
       }},
      {"schwarzschild", "Schwarzschild exterior, parameter m (default 1)",
       [](const std::map<std::string, double>& p) {
         check_param_names("schwarzschild", p, {"m"});
         const double m = param_or(p, "m", 1.0);
         if (!(m > 0.0)) throw ConfigError("schwarzschild: m must be positive");
         return diagonal_spec("schwarzschild", "Schwarzschild exterior (t, r, theta, phi)", {{"m", m}},
                              {"-(1-2*m/x1)", "1/(1-2*m/x1)", "x1^2", "x1^2*sin(x2)^2"},
                              {{{-1, 1}, {3 * m, 10 * m}, {0.3, 2.8}, {-1, 1}}}, Vacuum::Yes);
       }},
      {"kasner", "Kasner cosmology, exponents p1 p2 p3 (default 2/3, 2/3, -1/3)",
       [](const std::map<std::string, double>& p) {
         check_param_names("kasner", p, {"p1", "p2", "p3"});
         const double p1 = param_or(p, "p1", 2.0 / 3.0);
         const double p2 = param_or(p, "p2", 2.0 / 3.0);
         const double p3 = param_or(p, "p3", -1.0 / 3.0);
         const double s1 = p1 + p2 + p3;
         const double s2 = p1 * p1 + p2 * p2 + p3 * p3;
         const bool vacuum = std::abs(s1 - 1.0) < 1e-12 && std::abs(s2 - 1.0) < 1e-12;
         return diagonal_spec("kasner", "Kasner cosmology ds^2 = -dt^2 + sum t^(2 p_i) dx_i^2",
                              {{"p1", p1}, {"p2", p2}, {"p3", p3}},
                              {"-1", "exp(2*p1*ln(x0))", "exp(2*p2*ln(x0))", "exp(2*p3*ln(x0))"},
                              {{{1, 3}, {-1, 1}, {-1, 1}, {-1, 1}}}, vacuum ? Vacuum::Yes : Vacuum::No);
       }},
      {"ppwave", "plane-fronted wave, profile H = x^2 - y^2 in chart (u, v, x, y)",
       [](const std::map<std::string, double>& p) {
         check_param_names("ppwave", p, {});
         MetricSpec s = diagonal_spec("ppwave", "ds^2 = H du^2 + 2 du dv + dx^2 + dy^2, H = x^2 - y^2", {},
                                      {"x2^2 - x3^2", "0", "1", "1"}, {{{-1, 1}, {-1, 1}, {-1, 1}, {-1, 1}}},
                                      Vacuum::Yes);
         s.components[static_cast<std::size_t>(pair_index(0, 1))] = parse_expression("1");
         return s;
       }},
      {"flrw", "spatially flat FLRW, a(t) = a0 + adot t (defaults 1, 0.1)",
       [](const std::map<std::string, double>& p) {
         check_param_names("flrw", p, {"a0", "adot"});
         const std::string a2 = "(a0 + adot*x0)^2";
         return diagonal_spec("flrw", "ds^2 = -dt^2 + a(t)^2 (dx^2 + dy^2 + dz^2), a = a0 + adot t",
                              {{"a0", param_or(p, "a0", 1.0)}, {"adot", param_or(p, "adot", 0.1)}},
                              {"-1", a2, a2, a2}, {{{0, 1}, {-1, 1}, {-1, 1}, {-1, 1}}}, Vacuum::No);
       }},
      {"desitter", "de Sitter in flat slicing, a(t) = exp(H t), H default 0.5",
       [](const std::map<std::string, double>& p) {
         check_param_names("desitter", p, {"H"});
         const std::string a2 = "exp(2*H*x0)";
         return diagonal_spec("desitter", "ds^2 = -dt^2 + exp(2 H t) (dx^2 + dy^2 + dz^2)",
                              {{"H", param_or(p, "H", 0.5)}}, {"-1", a2, a2, a2},
                              {{{0, 1}, {-1, 1}, {-1, 1}, {-1, 1}}}, Vacuum::No);
       }},
  };
  return list;
}

/// Builtin by name with optional parameter overrides. Throws ConfigError.
inline MetricSpec builtin_metric(const std::string& name, const std::map<std::string, double>& params = {}) {
  for (const auto& b : builtin_metrics()) {
    if (b.name == name) {
      MetricSpec s = b.make(params);
      validate(s);
      return s;
    }
  }
  throw ConfigError("unknown metric '" + name + "'");
}

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_real(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    // allow a leading sign, which from_chars rejects only for '+'
    if (!t.empty() && t[0] == '+') return parse_real(t.substr(1), where);
    throw ConfigError(where + ": expected a real number, got '" + t + "'");
  }
  return v;
}

inline std::vector<int> parse_indices(const std::string& text, std::size_t count, const std::string& where) {
  std::istringstream is(text);
  std::vector<int> out;
  std::string tok;
  while (is >> tok) {
    if (tok.size() != 1 || tok[0] < '0' || tok[0] > '3') throw ConfigError(where + ": index must be 0..3, got '" + tok + "'");
    out.push_back(tok[0] - '0');
  }
  if (out.size() != count) throw ConfigError(where + ": expected " + std::to_string(count) + " indices");
  return out;
}

}  // namespace detail

/// Parse the metric definition format:
///
///   [metric]      name = ..., vacuum = yes|no|unknown, g a b = <expr>
///   [params]      name = <real>
///   [domain]      xi = lo..hi
///   [connection]  Gamma l m n = <expr>
///
/// `#` starts a comment. Omitted metric components are zero.
inline MetricSpec parse_metric_file(const std::string& text, const std::string& origin = "<metric file>") {
  using detail::trim;
  MetricSpec spec;
  spec.name = origin;
  struct Pending {
    int line;
    std::string text;
    std::string origin;
  };
  std::map<int, Pending> comps;
  std::map<int, Pending> conns;
  std::set<std::string> seen_domain;

  std::istringstream in(text);
  std::string raw;
  std::string section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno);
    std::string line = raw.substr(0, raw.find('#'));
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "metric" && section != "params" && section != "domain" && section != "connection") {
        throw ConfigError(where + ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError(where + ": entry outside of any section");

    if (section == "metric") {
      if (key == "name") {
        spec.name = value;
      } else if (key == "vacuum") {
        if (value == "yes") spec.vacuum = Vacuum::Yes;
        else if (value == "no") spec.vacuum = Vacuum::No;
        else if (value == "unknown") spec.vacuum = Vacuum::Unknown;
        else throw ConfigError(where + ": vacuum must be yes, no or unknown");
      } else if (key == "description") {
        spec.description = value;
      } else if (key.rfind("g", 0) == 0 && key.size() > 1 && std::isspace(static_cast<unsigned char>(key[1]))) {
        const auto idx = detail::parse_indices(key.substr(1), 2, where);
        const int p = pair_index(idx[0], idx[1]);
        if (comps.count(p) != 0) throw ConfigError(where + ": component g " + key.substr(2) + " given twice");
        comps[p] = Pending{lineno, value, where};
      } else {
        throw ConfigError(where + ": unknown key '" + key + "' in [metric]");
      }
    } else if (section == "params") {
      if (key.empty() || !(std::isalpha(static_cast<unsigned char>(key[0])) || key[0] == '_')) {
        throw ConfigError(where + ": bad parameter name '" + key + "'");
      }
      if (key == "pi" || (key.size() == 2 && key[0] == 'x' && key[1] >= '0' && key[1] <= '3')) {
        throw ConfigError(where + ": parameter name '" + key + "' is reserved");
      }
      spec.params[key] = detail::parse_real(value, where);
    } else if (section == "domain") {
      if (key.size() != 2 || key[0] != 'x' || key[1] < '0' || key[1] > '3') {
        throw ConfigError(where + ": domain keys are x0..x3");
      }
      const auto dots = value.find("..");
      if (dots == std::string::npos) throw ConfigError(where + ": domain must read 'lo..hi'");
      const auto i = static_cast<std::size_t>(key[1] - '0');
      spec.box[i] = {detail::parse_real(value.substr(0, dots), where), detail::parse_real(value.substr(dots + 2), where)};
      if (!seen_domain.insert(key).second) throw ConfigError(where + ": " + key + " given twice");
    } else {
      if (key.rfind("Gamma", 0) != 0) throw ConfigError(where + ": expected 'Gamma l m n = <expr>'");
      const auto idx = detail::parse_indices(key.substr(5), 3, where);
      const int k = 16 * idx[0] + 4 * idx[1] + idx[2];
      if (conns.count(k) != 0) throw ConfigError(where + ": connection component given twice");
      conns[k] = Pending{lineno, value, where};
    }
  }

  const auto names = detail::keys(spec.params);
  auto parse = [&](const Pending& p) {
    try {
      return parse_expression(p.text, names);
    } catch (const ParseError& e) {
      throw ConfigError(p.origin + ": " + e.what());
    }
  };
  for (std::size_t p = 0; p < 10; ++p) spec.components[p] = Expression::constant(0.0);
  for (const auto& [p, pending] : comps) spec.components[static_cast<std::size_t>(p)] = parse(pending);
  for (const auto& [k, pending] : conns) spec.connection[k] = parse(pending);
  try {
    validate(spec);
  } catch (const SingularPointError& e) {
    throw ConfigError("metric '" + spec.name + "': " + e.what());
  }
  return spec;
}

inline MetricSpec load_metric_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open metric file '" + path.string() + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_metric_file(ss.str(), path.string());
}

/// A builtin name (optionally "name:key=value,key=value") or a file path.
inline MetricSpec resolve_metric(const std::string& ref) {
  const auto colon = ref.find(':');
  const std::string name = ref.substr(0, colon);
  for (const auto& b : builtin_metrics()) {
    if (b.name != name) continue;
    std::map<std::string, double> params;
    if (colon != std::string::npos) {
      std::istringstream is(ref.substr(colon + 1));
      std::string item;
      while (std::getline(is, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("metric parameter must read key=value: '" + item + "'");
        params[detail::trim(item.substr(0, eq))] = detail::parse_real(item.substr(eq + 1), "metric '" + ref + "'");
      }
    }
    return builtin_metric(name, params);
  }
  if (std::filesystem::is_regular_file(ref)) return load_metric_file(ref);
  throw ConfigError("unknown metric '" + ref + "' (not a builtin and not a readable file)");
}

/// Metric component series of truncation order K centred at x.
inline std::vector<JetScalar> metric_jet_at(const MetricSpec& spec, const BasePoint& x, int order = kDefaultTruncationOrder) {
  if (!spec.contains(x)) throw DomainError("sample point outside the domain box of metric '" + spec.name + "'");
  const auto coords = coordinate_series(x, order);
  std::vector<JetScalar> out;
  out.reserve(10);
  for (const auto& c : spec.components) out.push_back(c.evaluate<JetScalar>(coords, spec.params));
  return out;
}

/// Connection series of order K-1: the Levi-Civita connection of the metric
/// series, with any component overridden by the metric description replaced.
inline std::vector<JetScalar> connection_jet_at(const MetricSpec& spec, std::span<const JetScalar> metric) {
  auto gamma = levi_civita_series(metric);
  if (spec.connection.empty()) return gamma;
  const int k = gamma.front().order();
  const auto coords = coordinate_series(metric.front().base_point(), metric.front().order());
  for (const auto& [idx, e] : spec.connection) {
    gamma[static_cast<std::size_t>(idx)] = e.evaluate<JetScalar>(coords, spec.params).truncated(k);
  }
  return gamma;
}

/// Prolongations used by the checks: J^3 with the order-4 block, and J^1 of
/// (g, Gamma) with the order-2 block.
inline EHJetPoint eh_point_at(const MetricSpec& spec, const BasePoint& x) {
  return prolong(metric_jet_at(spec, x, 4), 4);
}

inline EPJetPoint ep_point_at(const MetricSpec& spec, const BasePoint& x) {
  const auto g = metric_jet_at(spec, x, 4);
  const auto gamma = connection_jet_at(spec, g);
  return prolong_ep(g, gamma, 2);
}

}  // namespace msgr
