// Command-line front end: check, catalog list, jets.
//
// Exit codes: 0 pass, 1 a check family failed, 2 usage or configuration
// error, 3 numeric domain error.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "msgr/msgr.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

msgr::BasePoint parse_point(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw msgr::ConfigError("--at expects four comma-separated reals, got '" + text + "'");
    }
  }
  if (v.size() != 4) throw msgr::ConfigError("--at expects four comma-separated reals, got '" + text + "'");
  return {v[0], v[1], v[2], v[3]};
}

std::map<std::string, double> parse_tolerances(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const auto& it : items) {
    const auto eq = it.find('=');
    if (eq == std::string::npos) throw msgr::ConfigError("--tol expects family=value, got '" + it + "'");
    double v = 0.0;
    try {
      std::size_t used = 0;
      const std::string num = it.substr(eq + 1);
      v = std::stod(num, &used);
      if (used != num.size()) throw std::invalid_argument(num);
    } catch (const std::exception&) {
      throw msgr::ConfigError("--tol value is not a number: '" + it + "'");
    }
    out[it.substr(0, eq)] = v;
  }
  return out;
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw msgr::ConfigError("cannot write report to '" + path + "'");
  f << text;
  if (!f) throw msgr::ConfigError("write to '" + path + "' failed");
}

template <class Layout, class Point>
void dump_jet(const Point& p) {
  for (int id = 0; id < p.dim(); ++id) {
    std::printf("%4d  %-16s %.17g\n", id, msgr::coordinate_label<Layout>(id).c_str(), p[id] + 0.0);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Jet-space verification of the Einstein-Hilbert and Einstein-Palatini models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", msgr::kToolVersion);

  auto* check = app.add_subcommand("check", "sample points of a metric and run every check family");
  std::string model = "eh";
  std::string metric;
  int points = 10;
  std::uint64_t seed = 1;
  int trials = 5;
  std::vector<std::string> tols;
  std::string format = "json";
  std::string out;
  int verbosity = 0;
  check->add_option("--model", model, "eh or ep")->check(CLI::IsMember({"eh", "ep"}));
  check->add_option("--metric", metric, "builtin name (optionally name:key=value,...) or metric file")->required();
  check->add_option("--points", points, "number of sample points");
  check->add_option("--seed", seed, "sampling seed");
  check->add_option("--trials", trials, "projectability randomizations per point");
  check->add_option("--tol", tols, "tolerance override family=value (repeatable)");
  check->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  check->add_option("--out", out, "output path (default stdout)");
  check->add_flag("-v,--verbose", verbosity, "print a summary to stderr");

  auto* catalog = app.add_subcommand("catalog", "inspect the built-in metrics");
  catalog->require_subcommand(1);
  auto* list = catalog->add_subcommand("list", "list built-in metrics");

  auto* jets = app.add_subcommand("jets", "print the jet coordinates of a metric at a point");
  std::string jet_metric;
  std::string at;
  std::string jet_model = "eh";
  int jet_order = 3;
  jets->add_option("--metric", jet_metric, "builtin name or metric file")->required();
  jets->add_option("--at", at, "x0,x1,x2,x3")->required();
  jets->add_option("--model", jet_model, "eh or ep")->check(CLI::IsMember({"eh", "ep"}));
  jets->add_option("--order", jet_order, "jet order (eh: 0..4, ep: 0..2)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*check) {
      msgr::CheckConfig cfg;
      cfg.model = model == "ep" ? msgr::Model::EP : msgr::Model::EH;
      cfg.metric = metric;
      cfg.points = points;
      cfg.seed = seed;
      cfg.trials = trials;
      cfg.tolerances = parse_tolerances(tols);
      cfg.format = format == "csv" ? msgr::ReportFormat::Csv : msgr::ReportFormat::Json;
      cfg.verbosity = verbosity;
      if (!out.empty() && out != "-") {
        // Fail before the (possibly long) run if the destination is unusable.
        std::ofstream probe(out, std::ios::app);
        if (!probe) throw msgr::ConfigError("cannot write report to '" + out + "'");
      }
      const auto report = msgr::run_check(cfg);
      write_output(msgr::emit_report(report, cfg.format), out);
      if (verbosity > 0) {
        for (const auto& f : report.families) {
          std::fprintf(stderr, "%-32s %-4s max %.3e (tol %.1e, %d points)\n", f.family.c_str(), f.pass ? "ok" : "FAIL",
                       f.max_resid, f.tol, f.points);
        }
        std::fprintf(stderr, "verdict: %s\n", report.pass ? "pass" : "fail");
      }
      return report.pass ? kExitPass : kExitFail;
    }
    if (*catalog && *list) {
      for (const auto& b : msgr::builtin_metrics()) {
        const auto spec = b.make({});
        std::printf("%-16s vacuum=%-8s %s\n", b.name.c_str(), msgr::to_string(spec.vacuum), b.summary.c_str());
      }
      return kExitPass;
    }
    if (*jets) {
      const auto spec = msgr::resolve_metric(jet_metric);
      const auto x = parse_point(at);
      if (jet_model == "eh") {
        if (jet_order < 0 || jet_order > 4) throw msgr::ConfigError("eh jet order must be 0..4");
        dump_jet<msgr::EHLayout>(msgr::prolong(msgr::metric_jet_at(spec, x, 4), jet_order));
      } else {
        if (jet_order < 0 || jet_order > 2) throw msgr::ConfigError("ep jet order must be 0..2");
        const auto g = msgr::metric_jet_at(spec, x, 4);
        dump_jet<msgr::EPLayout>(msgr::prolong_ep(g, msgr::connection_jet_at(spec, g), jet_order));
      }
      return kExitPass;
    }
  } catch (const msgr::NumericError& e) {
    std::fprintf(stderr, "msgr: numeric domain error: %s\n", e.what());
    return kExitNumeric;
  } catch (const msgr::Error& e) {
    std::fprintf(stderr, "msgr: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
