#pragma once

// Batch verification over sampled points and report emission.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "msgr/catalog.hpp"
#include "msgr/eh_model.hpp"
#include "msgr/ep_model.hpp"
#include "msgr/errors.hpp"

namespace msgr {

inline constexpr const char* kToolName = "msgr";
inline constexpr const char* kToolVersion = "0.1.0";

enum class Model { EH, EP };
enum class ReportFormat { Json, Csv };
enum class ToleranceKind { Absolute, Relative };

inline const char* to_string(Model m) { return m == Model::EH ? "eh" : "ep"; }

struct FamilyInfo {
  const char* name;
  double tolerance;
  ToleranceKind kind;
};

inline constexpr double kIdentityTol = 1e-10;
inline constexpr double kVacuumTol = 1e-8;

/// Check families in report order, with default tolerances.
inline const std::vector<FamilyInfo>& families_for(Model m) {
  static const std::vector<FamilyInfo> eh{
      {"holonomy", kIdentityTol, ToleranceKind::Absolute},
      {"momenta-identity", kIdentityTol, ToleranceKind::Relative},
      {"hamiltonian-dual-form", kIdentityTol, ToleranceKind::Relative},
      {"einstein-constraint", kVacuumTol, ToleranceKind::Absolute},
      {"einstein-constraint-derivative", kVacuumTol, ToleranceKind::Absolute},
      {"projectability", kIdentityTol, ToleranceKind::Relative},
      {"field-equation", kVacuumTol, ToleranceKind::Absolute},
  };
  static const std::vector<FamilyInfo> ep{
      {"einstein-constraint", kVacuumTol, ToleranceKind::Absolute},
      {"premetricity", kVacuumTol, ToleranceKind::Absolute},
      {"torsion", kVacuumTol, ToleranceKind::Absolute},
      {"torsion-derivative", kVacuumTol, ToleranceKind::Absolute},
      {"integrability", kVacuumTol, ToleranceKind::Absolute},
      {"momenta-identity", kIdentityTol, ToleranceKind::Relative},
      {"projectability", kIdentityTol, ToleranceKind::Relative},
      {"eh-equivalence", kIdentityTol, ToleranceKind::Relative},
      {"field-equation", kVacuumTol, ToleranceKind::Absolute},
  };
  return m == Model::EH ? eh : ep;
}

struct CheckConfig {
  Model model = Model::EH;
  std::string metric = "minkowski";
  int points = 10;
  std::uint64_t seed = 1;
  int trials = 5;  // projectability randomizations per point
  std::map<std::string, double> tolerances;  // overrides by family name
  ReportFormat format = ReportFormat::Json;
  int verbosity = 0;
  unsigned threads = 0;  // 0: MSGR_THREADS, else hardware concurrency
};

struct FamilyRecord {
  std::string family;
  int points = 0;
  double max_resid = 0.0;
  double mean_resid = 0.0;
  double tol = 0.0;
  ToleranceKind kind = ToleranceKind::Absolute;
  bool pass = true;
  BasePoint worst_point{};
};

struct ConstraintReport {
  std::string tool = kToolName;
  std::string version = kToolVersion;
  Model model = Model::EH;
  std::string metric;
  std::uint64_t seed = 0;
  int points_requested = 0;
  int points_evaluated = 0;
  int points_skipped = 0;
  int trials = 0;
  std::vector<FamilyRecord> families;
  bool pass = true;

  const FamilyRecord* find(const std::string& name) const {
    for (const auto& f : families) {
      if (f.family == name) return &f;
    }
    return nullptr;
  }
};

/// Residuals of every family at one point; NaN marks "not applicable".
using PointResiduals = std::vector<double>;

namespace detail {

inline double max_abs_of(std::span<const double> v) { return max_abs(v); }

inline PointResiduals eh_point_residuals(const MetricSpec& spec, const BasePoint& x, int trials, std::uint64_t seed) {
  const auto series = metric_jet_at(spec, x, 4);
  const EHJetPoint p = prolong(series, 4);
  PointResiduals r;

  const auto hol = holonomy_residuals(p, section_derivatives(series));
  r.push_back(std::max(max_abs_of(hol.first), max_abs_of(hol.second)));

  const EHMomenta m = momenta_and_hamiltonian(p);
  r.push_back(relative_deviation(m.L2, m.L2_closed));
  const std::array<double, 1> hs{m.H_sum}, hc{m.H_closed};
  r.push_back(relative_deviation(hs, hc));

  r.push_back(max_abs_of(constraint_einstein(p)));
  r.push_back(max_abs_of(constraint_einstein_derivative(p)));
  r.push_back(projectability_check(p, trials, seed).max_deviation());
  r.push_back(verify_field_equation(p).norm);
  return r;
}

inline PointResiduals ep_point_residuals(const MetricSpec& spec, const BasePoint& x, int trials, std::uint64_t seed) {
  const auto g = metric_jet_at(spec, x, 4);
  const auto gamma = connection_jet_at(spec, g);
  const EPJetPoint p = prolong_ep(g, gamma, 2);
  const EPJetPoint q = p.truncated(1);
  PointResiduals r;
  r.push_back(max_abs_of(constraint_c0(q)));
  r.push_back(max_abs_of(constraint_premetricity(q)));
  r.push_back(max_abs_of(constraint_torsion(q)));
  r.push_back(max_abs_of(constraint_torsion_deriv(q)));
  r.push_back(max_abs_of(constraint_integrability(q)));

  const EPMomenta m = momenta_ep(q);
  r.push_back(std::max(relative_deviation(m.Lmom, m.Lmom_closed), m.antisymmetry_residual()));
  r.push_back(projectability_check_ep(q, trials, seed).max_deviation());
  if (spec.has_connection_override()) {
    r.push_back(std::nan(""));
  } else {
    const std::array<double, 1> lep{m.L}, leh{lagrangian_eh(prolong(g, 2))};
    r.push_back(relative_deviation(lep, leh));
  }
  r.push_back(verify_field_equation_ep(p).norm);
  return r;
}

inline unsigned worker_count(unsigned requested, int points) {
  unsigned n = requested;
  if (n == 0) {
    n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("MSGR_THREADS")) {
      char* end = nullptr;
      const long v = std::strtol(env, &end, 10);
      if (end == env || *end != '\0' || v < 1) throw ConfigError("MSGR_THREADS must be a positive integer");
      n = static_cast<unsigned>(v);  // honoured even above the core count
    }
  }
  return std::max(1u, std::min<unsigned>(n, static_cast<unsigned>(points)));
}

}  // namespace detail

/// Seeded uniform sample of the domain box.
inline std::vector<BasePoint> sample_points(const MetricSpec& spec, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<BasePoint> pts(static_cast<std::size_t>(n));
  for (auto& x : pts) {
    for (std::size_t i = 0; i < 4; ++i) x[i] = spec.box[i][0] + u(rng) * (spec.box[i][1] - spec.box[i][0]);
  }
  return pts;
}

inline ConstraintReport run_check(const CheckConfig& cfg, const MetricSpec& spec) {
  if (cfg.points < 1) throw ConfigError("--points must be at least 1");
  if (cfg.trials < 1) throw ConfigError("--trials must be at least 1");
  const auto& fams = families_for(cfg.model);
  for (const auto& [name, tol] : cfg.tolerances) {
    const bool known = std::any_of(fams.begin(), fams.end(), [&](const FamilyInfo& f) { return name == f.name; });
    if (!known) throw ConfigError("unknown check family '" + name + "' for model " + to_string(cfg.model));
    if (!(tol > 0.0) || !std::isfinite(tol)) throw ConfigError("tolerance for '" + name + "' must be positive");
  }

  const auto pts = sample_points(spec, cfg.points, cfg.seed);
  std::vector<std::optional<PointResiduals>> results(pts.size());
  std::vector<std::string> errors(pts.size());
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t i = next++; i < pts.size(); i = next++) {
      const std::uint64_t point_seed = cfg.seed * 0x9E3779B97F4A7C15ULL + i + 1;
      try {
        results[i] = cfg.model == Model::EH ? detail::eh_point_residuals(spec, pts[i], cfg.trials, point_seed)
                                            : detail::ep_point_residuals(spec, pts[i], cfg.trials, point_seed);
      } catch (const NumericError& e) {
        errors[i] = e.what();
      }
    }
  };
  const unsigned nthreads = detail::worker_count(cfg.threads, cfg.points);
  if (nthreads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  ConstraintReport rep;
  rep.model = cfg.model;
  rep.metric = spec.name;
  rep.seed = cfg.seed;
  rep.trials = cfg.trials;
  rep.points_requested = cfg.points;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (results[i]) {
      ++rep.points_evaluated;
    } else {
      ++rep.points_skipped;
    }
  }
  if (rep.points_skipped * 5 > cfg.points) {
    std::string first;
    for (const auto& e : errors) {
      if (!e.empty()) {
        first = e;
        break;
      }
    }
    throw DomainError(std::to_string(rep.points_skipped) + " of " + std::to_string(cfg.points) +
                      " sample points were singular (first: " + first + ")");
  }

  for (std::size_t f = 0; f < fams.size(); ++f) {
    FamilyRecord rec;
    rec.family = fams[f].name;
    rec.kind = fams[f].kind;
    const auto ov = cfg.tolerances.find(rec.family);
    rec.tol = ov != cfg.tolerances.end() ? ov->second : fams[f].tolerance;
    double sum = 0.0;
    bool first = true;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (!results[i]) continue;
      const double v = (*results[i])[f];
      if (std::isnan(v)) continue;
      ++rec.points;
      sum += v;
      if (first || v > rec.max_resid) {
        rec.max_resid = v;
        rec.worst_point = pts[i];
        first = false;
      }
    }
    if (rec.points == 0) continue;  // not applicable to this metric
    rec.mean_resid = sum / rec.points;
    rec.pass = rec.max_resid <= rec.tol;
    rep.pass = rep.pass && rec.pass;
    rep.families.push_back(rec);
  }
  return rep;
}

inline ConstraintReport run_check(const CheckConfig& cfg) { return run_check(cfg, resolve_metric(cfg.metric)); }

namespace detail {

inline std::string num(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

}  // namespace detail

/// JSON with every number printed to 17 significant digits. The output
/// depends only on the configuration and seed, never on thread count.
inline std::string to_json(const ConstraintReport& r) {
  using detail::json_string;
  using detail::num;
  std::ostringstream os;
  os << "{\n";
  os << "  \"tool\": " << json_string(r.tool) << ",\n";
  os << "  \"version\": " << json_string(r.version) << ",\n";
  os << "  \"model\": " << json_string(to_string(r.model)) << ",\n";
  os << "  \"metric\": " << json_string(r.metric) << ",\n";
  os << "  \"seed\": " << r.seed << ",\n";
  os << "  \"config\": {\"points\": " << r.points_requested << ", \"trials\": " << r.trials
     << ", \"antisymmetrization\": \"half\"},\n";
  os << "  \"points_evaluated\": " << r.points_evaluated << ",\n";
  os << "  \"points_skipped\": " << r.points_skipped << ",\n";
  os << "  \"families\": [";
  for (std::size_t i = 0; i < r.families.size(); ++i) {
    const auto& f = r.families[i];
    os << (i == 0 ? "\n" : ",\n");
    os << "    {\"family\": " << json_string(f.family) << ", \"points\": " << f.points
       << ", \"max_resid\": " << num(f.max_resid) << ", \"mean_resid\": " << num(f.mean_resid)
       << ", \"tol\": " << num(f.tol) << ", \"tol_kind\": \""
       << (f.kind == ToleranceKind::Relative ? "relative" : "absolute") << "\", \"pass\": " << (f.pass ? "true" : "false")
       << ", \"worst_point\": [" << num(f.worst_point[0]) << ", " << num(f.worst_point[1]) << ", "
       << num(f.worst_point[2]) << ", " << num(f.worst_point[3]) << "]}";
  }
  os << "\n  ],\n";
  os << "  \"verdict\": \"" << (r.pass ? "pass" : "fail") << "\"\n";
  os << "}\n";
  return os.str();
}

inline std::string to_csv(const ConstraintReport& r) {
  std::ostringstream os;
  os << "family,points,max_resid,mean_resid,tol,pass\n";
  for (const auto& f : r.families) {
    os << f.family << ',' << f.points << ',' << detail::num(f.max_resid) << ',' << detail::num(f.mean_resid) << ','
       << detail::num(f.tol) << ',' << (f.pass ? "true" : "false") << '\n';
  }
  return os.str();
}

inline std::string emit_report(const ConstraintReport& r, ReportFormat f) {
  return f == ReportFormat::Json ? to_json(r) : to_csv(r);
}

}  // namespace msgr
