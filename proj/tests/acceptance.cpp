// Acceptance run: prints one PASS/FAIL line per criterion and exits nonzero
// if any of them fails.
#include <chrono>
#include <cstdio>
#include <functional>

#include "msgr/msgr.hpp"
#include "oracle.hpp"

using namespace msgr;

namespace {

int failures = 0;

void verdict(int id, const char* what, bool ok, const std::string& detail) {
  std::printf("criterion %2d %s: %s (%s)\n", id, ok ? "PASS" : "FAIL", what, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double rel1(double a, double b) {
  const std::array<double, 1> x{a}, y{b};
  return relative_deviation(x, y);
}

std::vector<MetricSpec> catalog() {
  std::vector<MetricSpec> out;
  for (const auto& b : builtin_metrics()) out.push_back(b.make({}));
  out.push_back(load_metric_file(MSGR_SAMPLES "/schwarzschild.metric"));
  out.push_back(load_metric_file(MSGR_SAMPLES "/warped.metric"));
  return out;
}

const std::vector<std::string> kVacuum{"minkowski", "schwarzschild:m=1", "kasner", "ppwave"};

void dimensions() {
  const bool ok = EHLayout::dim(0) == 14 && EPLayout::dim(0) == 78 && EPLayout::dim(1) == 374;
  verdict(1, "bundle dimensions", ok,
          "EH " + std::to_string(EHLayout::dim(0)) + ", EP " + std::to_string(EPLayout::dim(0)) + " / " +
              std::to_string(EPLayout::dim(1)));
}

void momenta_and_dual_form() {
  double worst_l2 = 0.0, worst_h = 0.0;
  int points = 0;
  for (const auto& spec : catalog()) {
    for (const auto& x : sample_points(spec, 30, 2)) {
      const auto m = momenta_and_hamiltonian(eh_point_at(spec, x));
      worst_l2 = std::max(worst_l2, relative_deviation(m.L2, m.L2_closed));
      worst_h = std::max(worst_h, rel1(m.H_sum, m.H_closed));
      ++points;
    }
  }
  verdict(2, "second-order momenta identity", worst_l2 <= 1e-10,
          fmt("max rel %.3g over %g points", worst_l2, points));
  verdict(3, "Hamiltonian dual form", worst_h <= 1e-10, fmt("max rel %.3g over %g points", worst_h, points));
}

void vacuum_certification() {
  const auto t0 = std::chrono::steady_clock::now();
  double le = 0.0, dle = 0.0, fe = 0.0;
  for (const auto& name : kVacuum) {
    const auto spec = resolve_metric(name);
    for (const auto& x : sample_points(spec, 50, 4)) {
      const auto p = eh_point_at(spec, x);
      le = std::max(le, max_abs(constraint_einstein(p)));
      dle = std::max(dle, max_abs(constraint_einstein_derivative(p)));
      fe = std::max(fe, verify_field_equation(p).norm);
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = le <= 1e-8 && dle <= 1e-8 && fe <= 1e-8 && secs <= 30.0;
  verdict(4, "vacuum certification", ok,
          fmt("|L| %.3g, |DL| %.3g, ", le, dle) + fmt("|i(X)Omega| %.3g, %.2f s", fe, secs));
}

void non_vacuum_control() {
  const auto L = constraint_einstein(eh_point_at(resolve_metric("flrw"), {0, 0, 0, 0}));
  const double l00 = std::abs(L[pair_index(0, 0)]);
  CheckConfig c;
  c.model = Model::EH;
  c.metric = "flrw";
  c.points = 10;
  c.threads = 1;
  const auto rep = run_check(c);
  const auto* e = rep.find("einstein-constraint");
  const bool flagged = e != nullptr && !e->pass && !rep.pass;
  verdict(5, "non-vacuum control", std::abs(l00 - 0.03) <= 1e-6 && flagged,
          fmt("|L00| = %.12g, einstein-constraint ", l00) + (flagged ? "FAIL as required" : "did not fail"));
}

void projectability() {
  double eh_dev = 0.0, ep_dev = 0.0, eh_ctrl = 1e300, ep_ctrl = 1e300;
  for (const auto& name : {"schwarzschild", "kasner", "flrw", "ppwave", "desitter"}) {
    const auto spec = resolve_metric(name);
    for (const auto& x : sample_points(spec, 4, 6)) {
      const auto r = projectability_check(eh_point_at(spec, x), 5, 17);
      eh_dev = std::max(eh_dev, r.max_deviation());
      eh_ctrl = std::min(eh_ctrl, r.lagrangian);
      const auto q = projectability_check_ep(ep_point_at(spec, x), 5, 19);
      ep_dev = std::max({ep_dev, q.max_deviation(), q.hamiltonian_dgamma_only});
      ep_ctrl = std::min(ep_ctrl, q.lagrangian);
    }
  }
  // The control is the smallest relative move of L seen in any trial set.
  const bool ok = eh_dev <= 1e-10 && ep_dev <= 1e-10 && eh_ctrl > 1e-6 && ep_ctrl > 1e-6;
  verdict(6, "projectability", ok,
          fmt("EH %.3g, EP %.3g, ", eh_dev, ep_dev) + fmt("controls moved L by >= %.3g / %.3g", eh_ctrl, ep_ctrl));
}

void ep_suite() {
  double fam = 0.0, equiv = 0.0;
  for (const auto& name : kVacuum) {
    const auto spec = resolve_metric(name);
    for (const auto& x : sample_points(spec, 50, 8)) {
      const auto p = ep_point_at(spec, x);
      fam = std::max({fam, max_abs(constraint_c0(p)), max_abs(constraint_premetricity(p)),
                      max_abs(constraint_torsion(p)), max_abs(constraint_torsion_deriv(p)),
                      max_abs(constraint_integrability(p))});
      equiv = std::max(equiv, rel1(lagrangian_ep(p), lagrangian_eh(eh_point_at(spec, x))));
    }
  }
  // Equivalence also on curved non-vacuum backgrounds, where L is nonzero.
  for (const auto& name : {"flrw", "desitter"}) {
    const auto spec = resolve_metric(name);
    for (const auto& x : sample_points(spec, 20, 8))
      equiv = std::max(equiv, rel1(lagrangian_ep(ep_point_at(spec, x)), lagrangian_eh(eh_point_at(spec, x))));
  }
  verdict(7, "EP constraint suite on Levi-Civita sections", fam <= 1e-8 && equiv <= 1e-10,
          fmt("families %.3g, EH/EP rel %.3g", fam, equiv));
}

void projective_gauge() {
  const std::array<double, 4> A{0.3, -0.1, 0.2, 0.05};
  const std::array<std::array<double, 4>, 4> zero{};
  const std::array<std::array<double, 4>, 4> linear{
      {{0.1, 0.5, 0, 0}, {-0.2, -0.3, 0, 0.1}, {0, 0, 0.4, 0.2}, {0.3, 0.1, -0.2, 0}}};
  double worst = 0.0, raw = 0.0;
  for (const auto& name : kVacuum) {
    const auto spec = resolve_metric(name);
    for (const auto& x : sample_points(spec, 20, 12)) {
      const auto p = ep_point_at(spec, x);
      for (const auto& dA : {zero, linear}) {
        const auto q = projective_shift(p, A, dA);
        worst = std::max({worst, max_abs(constraint_premetricity(q)), max_abs(constraint_torsion(q)),
                          max_abs(constraint_torsion_deriv(q))});
        raw = std::max(raw, max_abs(torsion_components(ep_detail::connection<double>(q))));
      }
    }
  }
  verdict(8, "projective gauge invariance", worst <= 1e-8 && raw > 0.1,
          fmt("max family %.3g, raw torsion of shifted connection %.3g", worst, raw));
}

void oracle_agreement() {
  double worst = 0.0;
  std::string where;
  for (const auto& spec : catalog()) {
    const oracle::MetricFn g = [&](const oracle::Point& x) {
      const auto m = spec.metric_value(x);
      oracle::Matrix out;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) out(a, b) = m[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
      return out;
    };
    for (const auto& x : sample_points(spec, 10, 21)) {
      const auto s = einstein_suite(eh_point_at(spec, x).truncated(2));
      const auto o = oracle::curvature_at(g, x);
      const std::array<double, 1> sc{s.scalar}, osc{o.scalar};
      const double gap = std::max({oracle::relative_gap(s.gamma, o.gamma),
                                   oracle::relative_gap(oracle::flatten_rows(s.ricci), oracle::flatten(o.ricci)),
                                   oracle::relative_gap(sc, osc),
                                   oracle::relative_gap(oracle::flatten_rows(s.einstein_lower), oracle::flatten(o.einstein))});
      if (gap > worst) {
        worst = gap;
        where = spec.name;
      }
    }
  }
  verdict(9, "finite-difference oracle agreement", worst <= 1e-5, fmt("max rel %.3g", worst) + " at " + where);
}

void determinism() {
  bool same = true;
  for (const Model m : {Model::EH, Model::EP}) {
    for (const std::string metric : {"schwarzschild", "flrw"}) {
      CheckConfig c;
      c.model = m;
      c.metric = metric;
      c.points = 12;
      c.seed = 99;
      c.threads = 1;
      const auto serial = to_json(run_check(c));
      c.threads = 4;
      same = same && to_json(run_check(c)) == serial;
    }
  }
  verdict(10, "determinism", same, same ? "serial and 4-thread JSON identical" : "reports differ");
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> steps{dimensions,     momenta_and_dual_form, vacuum_certification,
                                                  non_vacuum_control, projectability,  ep_suite,
                                                  projective_gauge,   oracle_agreement, determinism};
  for (const auto& step : steps) {
    try {
      step();
    } catch (const std::exception& e) {
      std::printf("FAIL: unexpected exception: %s\n", e.what());
      ++failures;
    }
  }
  std::printf("%s: %d criterion failure(s)\n", failures == 0 ? "PASS" : "FAIL", failures);
  return failures == 0 ? 0 : 1;
}
