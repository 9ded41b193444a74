// evscale: likelihood ratios vs p-values for coin-tossing experiments.
//
// Subcommands: report, table, stopping, family, threshold. Shared flags
// (--format, --out, --precision, --seed, --workers) can also come from
// EVSC_-prefixed environment variables; explicit flags win.
//
// Exit status: 0 ok, 2 usage error, 3 domain error, 4 numeric error.

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "evscale/asymptotics.hpp"
#include "evscale/exact.hpp"
#include "evscale/families.hpp"
#include "evscale/report.hpp"
#include "evscale/special.hpp"
#include "evscale/stopping.hpp"
#include "evscale/tables.hpp"

namespace {

using evscale::ordered_json;

struct SharedOptions {
  std::string format; // empty = subcommand default
  std::string out;
  std::string precision = "paper";
  std::uint64_t seed = 0;
  int workers = 0;
};

void add_shared(CLI::App* cmd, SharedOptions& shared) {
  cmd->add_option("--format", shared.format, "Output format: text, csv, json")
      ->envname("EVSC_FORMAT")
      ->check(CLI::IsMember({"text", "csv", "json"}));
  cmd->add_option("--out", shared.out, "Write output to FILE instead of stdout")
      ->envname("EVSC_OUT");
  cmd->add_option("--precision", shared.precision,
                  "Numeric precision for text/csv: paper or full")
      ->envname("EVSC_PRECISION")
      ->check(CLI::IsMember({"paper", "full"}));
  cmd->add_option("--seed", shared.seed, "RNG seed (stopping)")
      ->envname("EVSC_SEED");
  cmd->add_option("--workers", shared.workers,
                  "Worker threads for stopping (0 = hardware)")
      ->envname("EVSC_WORKERS");
}

evscale::OutputFormat parse_format(const SharedOptions& shared,
                                   const char* fallback) {
  const std::string& f = shared.format.empty() ? fallback : shared.format;
  if (f == "csv") return evscale::OutputFormat::csv;
  if (f == "json") return evscale::OutputFormat::json;
  return evscale::OutputFormat::text;
}

evscale::Precision parse_precision(const SharedOptions& shared) {
  return shared.precision == "full" ? evscale::Precision::full
                                    : evscale::Precision::paper;
}

void emit(const SharedOptions& shared, const std::string& payload) {
  if (shared.out.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream f(shared.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + shared.out);
  f << payload;
}

std::string fmt_value(double v, evscale::Precision prec) {
  char buf[64];
  std::snprintf(buf, sizeof(buf),
                prec == evscale::Precision::full ? "%.17g" : "%.6g", v);
  return buf;
}

std::string json_scalar_to_text(const ordered_json& v,
                                evscale::Precision prec) {
  if (v.is_number_float()) return fmt_value(v.get<double>(), prec);
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

// Flat key/value object as "key: value" text or a two-line CSV.
std::string render_flat(const ordered_json& j, evscale::OutputFormat format,
                        evscale::Precision prec) {
  if (format == evscale::OutputFormat::json) return j.dump(2) + "\n";
  std::vector<std::string> keys, values;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.value().is_array() || it.value().is_object()) continue;
    keys.push_back(it.key());
    values.push_back(json_scalar_to_text(it.value(), prec));
  }
  std::string out;
  if (format == evscale::OutputFormat::csv) {
    for (std::size_t i = 0; i < keys.size(); ++i)
      out += (i ? "," : "") + keys[i];
    out += '\n';
    for (std::size_t i = 0; i < values.size(); ++i)
      out += (i ? "," : "") + values[i];
    out += '\n';
  } else {
    for (std::size_t i = 0; i < keys.size(); ++i)
      out += keys[i] + ": " + values[i] + "\n";
  }
  return out;
}

int usage_error(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return 2;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Likelihood ratios and p-values for coin-tossing hypotheses"};
  app.require_subcommand(1);

  SharedOptions shared;
  std::function<int()> action;

  // ---- report ----
  auto* report = app.add_subcommand(
      "report", "Evidence report (exact + asymptotic LR and p) for one experiment");
  struct {
    std::int64_t n = 0, k = 0;
    double p0 = 0.5;
  } rep;
  report->add_option("--n", rep.n, "Number of tosses")->required();
  report->add_option("--k", rep.k, "Number of heads")->required();
  report->add_option("--p0", rep.p0, "Null success probability (default 0.5)");
  add_shared(report, shared);
  report->callback([&] {
    action = [&]() -> int {
      if (rep.n < 1 || rep.k < 0 || rep.k > rep.n)
        return usage_error("report: need n >= 1 and 0 <= k <= n");
      if (!(rep.p0 > 0.0 && rep.p0 < 1.0))
        return usage_error("report: need 0 < p0 < 1");
      auto r = evscale::make_evidence_report(evscale::Experiment(rep.n, rep.k),
                                             rep.p0);
      emit(shared, render_flat(evscale::evidence_report_to_json(r),
                               parse_format(shared, "text"),
                               parse_precision(shared)));
      return 0;
    };
  });

  // ---- table ----
  auto* table = app.add_subcommand("table", "Reproduce table 1, 2, or 3");
  int which = 0;
  table->add_option("which", which, "Table number")->required()
      ->check(CLI::Range(1, 3));
  add_shared(table, shared);
  table->callback([&] {
    action = [&]() -> int {
      emit(shared, evscale::render_table(which, parse_format(shared, "text"),
                                         parse_precision(shared)));
      return 0;
    };
  });

  // ---- stopping ----
  auto* stopping = app.add_subcommand(
      "stopping", "Monte Carlo of the c-sigma boundary stopping time");
  struct {
    std::int64_t m = 0;
    double c = 0.0;
    std::int64_t trials = 100000;
    std::int64_t max_tosses = 100000000;
  } stop;
  stopping->add_option("--m", stop.m, "Initial toss count")->required();
  stopping->add_option("--c", stop.c, "Boundary in standard deviations")
      ->required();
  stopping->add_option("--trials", stop.trials, "Number of trials");
  stopping->add_option("--max-tosses", stop.max_tosses,
                       "Per-trial truncation cap");
  add_shared(stopping, shared);
  stopping->callback([&] {
    action = [&]() -> int {
      if (stop.m < 1 || !(stop.c > 0.0) || stop.trials < 1 ||
          stop.max_tosses < stop.m)
        return usage_error(
            "stopping: need m >= 1, c > 0, trials >= 1, max-tosses >= m");
      evscale::StoppingConfig cfg{stop.m, stop.c, stop.trials, stop.max_tosses,
                                  shared.seed};
      auto res = evscale::simulate_stopping(cfg, shared.workers);
      ordered_json j = evscale::stopping_result_to_json(res);
      auto format = parse_format(shared, "json");
      if (format == evscale::OutputFormat::json) {
        emit(shared, j.dump(2) + "\n");
      } else {
        std::string out = render_flat(j, format, parse_precision(shared));
        if (format == evscale::OutputFormat::text) {
          for (const auto& b : res.stopped_n_histogram)
            out += "histogram [" + std::to_string(b.lo) + ", " +
                   std::to_string(b.hi) + "): " + std::to_string(b.count) +
                   "\n";
        }
        emit(shared, out);
      }
      return 0;
    };
  });

  // ---- family ----
  auto* family = app.add_subcommand(
      "family", "Evaluate LR_x / LR_f / LR_alpha for a chosen alternative");
  struct {
    std::int64_t n = 0, k = 0;
    double p0 = 0.5;
    double x = 0.0;
    std::vector<double> uniform;
    std::vector<double> normal;
    double alpha = 0.0;
    std::string kernel = "approx";
  } fam;
  family->add_option("--n", fam.n, "Number of tosses")->required();
  family->add_option("--k", fam.k, "Number of heads")->required();
  family->add_option("--p0", fam.p0, "Null success probability");
  auto* ox = family->add_option("--x", fam.x,
                                "Point alternative offset in sigma_n units");
  auto* ou = family->add_option("--uniform", fam.uniform,
                                "Uniform density alternative: LO HI")
                 ->expected(2);
  auto* on = family->add_option("--normal", fam.normal,
                                "Normal density alternative: MEAN SD")
                 ->expected(2);
  auto* oa = family->add_option("--alpha", fam.alpha,
                                "One-sided uniform width for LR_alpha");
  family->add_option("--kernel", fam.kernel,
                     "Quadrature kernel: approx or exact")
      ->check(CLI::IsMember({"approx", "exact"}));
  add_shared(family, shared);
  family->callback([&] {
    action = [&]() -> int {
      if (fam.n < 1 || fam.k < 0 || fam.k > fam.n)
        return usage_error("family: need n >= 1 and 0 <= k <= n");
      if (!(fam.p0 > 0.0 && fam.p0 < 1.0))
        return usage_error("family: need 0 < p0 < 1");
      int modes = (!ox->empty()) + (!ou->empty()) + (!on->empty()) +
                  (!oa->empty());
      if (modes != 1)
        return usage_error(
            "family: pass exactly one of --x, --uniform, --normal, --alpha");
      evscale::Experiment e(fam.n, fam.k);
      auto par = evscale::standardize(e, fam.p0);
      auto kernel = fam.kernel == "exact" ? evscale::LrKernel::exact
                                          : evscale::LrKernel::leading_order;
      ordered_json j;
      j["n"] = fam.n;
      j["k"] = fam.k;
      j["p0"] = evscale::json_number(fam.p0);
      j["u"] = evscale::json_number(par.u);
      if (!ox->empty()) {
        j["mode"] = "point";
        j["x"] = evscale::json_number(fam.x);
        j["lr_x_exact"] = evscale::json_number(
            evscale::lr_x_exact(e, fam.p0, fam.x));
        j["lr_x_approx"] = evscale::json_number(
            evscale::lr_x_approx(par.u, fam.x));
      } else if (!ou->empty()) {
        j["mode"] = "uniform";
        j["support_lo"] = evscale::json_number(fam.uniform[0]);
        j["support_hi"] = evscale::json_number(fam.uniform[1]);
        j["kernel"] = fam.kernel;
        j["lr_f"] = evscale::json_number(evscale::lr_f(
            e, fam.p0,
            evscale::uniform_alternative(fam.uniform[0], fam.uniform[1]),
            kernel));
      } else if (!on->empty()) {
        j["mode"] = "normal";
        j["mean"] = evscale::json_number(fam.normal[0]);
        j["sd"] = evscale::json_number(fam.normal[1]);
        j["kernel"] = fam.kernel;
        j["lr_f"] = evscale::json_number(evscale::lr_f(
            e, fam.p0,
            evscale::normal_alternative(fam.normal[0], fam.normal[1]),
            kernel));
        j["lr_normal_closed_form"] = evscale::json_number(
            evscale::lr_normal_family(e, fam.p0, fam.p0 - fam.normal[0],
                                      fam.normal[1]));
      } else {
        j["mode"] = "alpha";
        j["alpha"] = evscale::json_number(fam.alpha);
        j["lr_alpha"] = evscale::json_number(
            evscale::lr_alpha(e, fam.p0, fam.alpha));
        double phi = evscale::phi_cdf(-par.u);
        j["closed_form"] = evscale::json_number(phi / (1.0 - phi));
      }
      emit(shared, render_flat(j, parse_format(shared, "text"),
                               parse_precision(shared)));
      return 0;
    };
  });

  // ---- threshold ----
  auto* threshold = app.add_subcommand(
      "threshold", "Finiteness threshold c* for E(T^mu)");
  double mu = 0.0;
  threshold->add_option("--mu", mu, "Moment order (positive)")->required();
  add_shared(threshold, shared);
  threshold->callback([&] {
    action = [&]() -> int {
      double c_star = evscale::finiteness_threshold(mu);
      ordered_json j;
      j["mu"] = evscale::json_number(mu);
      j["c_star"] = evscale::json_number(c_star);
      emit(shared, render_flat(j, parse_format(shared, "text"),
                               parse_precision(shared)));
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return action ? action() : usage_error("no subcommand selected");
  } catch (const evscale::numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
