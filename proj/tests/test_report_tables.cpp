#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "evscale/report.hpp"
#include "evscale/tables.hpp"

using Catch::Approx;
using namespace evscale;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string golden(const std::string& name) {
  return slurp(std::string(EVSCALE_GOLDEN_DIR) + "/" + name);
}

struct CommandResult {
  int status;
  std::string output;
};

CommandResult run_cli(const std::string& args) {
  static int counter = 0;
  std::string tmp = "cli_out_" + std::to_string(counter++) + ".tmp";
  std::string cmd = std::string(EVSCALE_CLI_PATH) + " " + args + " > " + tmp +
                    " 2> /dev/null";
  int raw = std::system(cmd.c_str());
  CommandResult r;
  r.status = WEXITSTATUS(raw);
  std::ifstream f(tmp, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  r.output = ss.str();
  std::remove(tmp.c_str());
  return r;
}

} // namespace

TEST_CASE("evidence report for the first table row") {
  auto r = make_evidence_report(Experiment(20, 6), 0.5);
  CHECK(r.u == Approx(1.789).margin(5e-4));
  CHECK(r.exact_lr == Approx(1.288).margin(5e-4));
  CHECK(r.exact_p_two_sided == Approx(0.11532).margin(5e-6));
  CHECK(r.lr_envelope.contains(r.exact_lr));
  CHECK(r.lr_envelope.provenance == BoundProvenance::e1e2);
  CHECK(r.approx_p.lower <= 2.0 * phi_cdf(-r.u));
  CHECK(2.0 * phi_cdf(-r.u) <= r.approx_p.upper);
  CHECK(r.max_attainable_lr == Approx(std::exp(0.5 * r.u * r.u)));
}

TEST_CASE("evidence report at the mean observation") {
  auto r = make_evidence_report(Experiment(10, 5), 0.5);
  CHECK(r.u == 0.0);
  CHECK(r.exact_p_two_sided == 1.0);
  CHECK(r.max_attainable_lr == 1.0);
  CHECK(std::isinf(r.approx_p.value)); // formula singular at u = 0
  CHECK(r.approx_p.lower == 0.0);
}

TEST_CASE("evidence report JSON round trip") {
  for (auto [n, k, p0] : {std::tuple<std::int64_t, std::int64_t, double>{20, 6, 0.5},
                          {10, 5, 0.5},
                          {1000, 460, 0.3},
                          {100, 3, 0.5}}) {
    auto r = make_evidence_report(Experiment(n, k), p0);
    auto j = evidence_report_to_json(r);
    auto parsed = ordered_json::parse(j.dump(2));
    auto back = evidence_report_from_json(parsed);
    CHECK(back.n == r.n);
    CHECK(back.k == r.k);
    CHECK(back.p0 == r.p0);
    CHECK(back.u == r.u);
    CHECK(back.exact_lr == r.exact_lr);
    CHECK(back.approx_lr == r.approx_lr);
    CHECK(back.lr_envelope.value == r.lr_envelope.value);
    CHECK(back.lr_envelope.lower == r.lr_envelope.lower);
    CHECK(back.lr_envelope.upper == r.lr_envelope.upper);
    CHECK(back.lr_envelope.provenance == r.lr_envelope.provenance);
    CHECK(back.exact_p_two_sided == r.exact_p_two_sided);
    CHECK(back.approx_p.value == r.approx_p.value);
    CHECK(back.approx_p.lower == r.approx_p.lower);
    CHECK(back.approx_p.upper == r.approx_p.upper);
    CHECK(back.max_attainable_lr == r.max_attainable_lr);
  }
}

TEST_CASE("tables match the committed golden files") {
  CHECK(render_table(1, OutputFormat::text, Precision::paper) ==
        golden("table1.txt"));
  CHECK(render_table(2, OutputFormat::text, Precision::paper) ==
        golden("table2.txt"));
  CHECK(render_table(3, OutputFormat::text, Precision::paper) ==
        golden("table3.txt"));
  CHECK(render_table(1, OutputFormat::csv, Precision::paper) ==
        golden("table1.csv"));
  CHECK(render_table(2, OutputFormat::csv, Precision::paper) ==
        golden("table2.csv"));
  CHECK(render_table(3, OutputFormat::csv, Precision::paper) ==
        golden("table3.csv"));
}

TEST_CASE("table digits reproduce the printed values") {
  std::string t1 = render_table(1, OutputFormat::csv, Precision::paper);
  CHECK(t1.find("20,6,1.789,1.288,0.11532") != std::string::npos);
  CHECK(t1.find("100,40,2.000,0.913,0.05689") != std::string::npos);
  CHECK(t1.find("1000,460,2.530,0.972,0.01244") != std::string::npos);
  CHECK(t1.find("10000,4852,2.960,1.002,0.00318") != std::string::npos);
  CHECK(t1.find("100000,49474,3.327,1.003,0.00089") != std::string::npos);
  CHECK(t1.find("1000000,498172,3.656,1.001,0.00026") != std::string::npos);

  std::string t2 = render_table(2, OutputFormat::csv, Precision::paper);
  CHECK(t2.find("u,3.70,4.97") != std::string::npos);
  CHECK(t2.find("p_value,2.2e-04,6.7e-07") != std::string::npos);
  CHECK(t2.find("lr,11.8,0.916") != std::string::npos);

  std::string t3 = render_table(3, OutputFormat::csv, Precision::paper);
  CHECK(t3.find("one,0.050,1.645,3.9") != std::string::npos);
  CHECK(t3.find("one,0.010,2.326,15.0") != std::string::npos);
  CHECK(t3.find("one,0.005,2.576,27.6") != std::string::npos);
  CHECK(t3.find("one,0.001,3.090,118.5") != std::string::npos);
  CHECK(t3.find("two,0.050,1.960,6.8") != std::string::npos);
  CHECK(t3.find("two,0.010,2.576,27.6") != std::string::npos);
  CHECK(t3.find("two,0.005,2.807,51.4") != std::string::npos);
  CHECK(t3.find("two,0.001,3.291,224.5") != std::string::npos);
}

TEST_CASE("cli table output matches the goldens byte for byte") {
  CHECK(run_cli("table 1").output == golden("table1.txt"));
  CHECK(run_cli("table 2").output == golden("table2.txt"));
  CHECK(run_cli("table 3").output == golden("table3.txt"));
  CHECK(run_cli("table 1 --format csv").output == golden("table1.csv"));
  CHECK(run_cli("table 2 --format csv").output == golden("table2.csv"));
  CHECK(run_cli("table 3 --format csv").output == golden("table3.csv"));
}

TEST_CASE("cli report round trips through JSON") {
  auto res = run_cli("report --n 20 --k 6 --format json");
  REQUIRE(res.status == 0);
  auto parsed = ordered_json::parse(res.output);
  auto back = evidence_report_from_json(parsed);
  auto direct = make_evidence_report(Experiment(20, 6), 0.5);
  CHECK(back.u == direct.u);
  CHECK(back.exact_lr == direct.exact_lr);
  CHECK(back.exact_p_two_sided == direct.exact_p_two_sided);
}

TEST_CASE("cli exit codes") {
  CHECK(run_cli("report --n 20 --k 6").status == 0);
  CHECK(run_cli("report --n 20").status == 2);           // missing -k
  CHECK(run_cli("report --n 5 --k 9").status == 2);      // k > n
  CHECK(run_cli("table 7").status == 2);                 // out of range
  CHECK(run_cli("nonsense").status == 2);                // unknown command
  // hypothesized p outside (0,1) surfaces as a domain error
  CHECK(run_cli("family --n 100 --k 50 --x -60").status == 3);
  CHECK(run_cli("--help").status == 0);
}

TEST_CASE("cli stopping output is byte-identical across worker counts") {
  std::string base = "stopping --m 50 --c 1.5 --trials 400 --max-tosses 20000 "
                     "--seed 7 --format json";
  auto w1 = run_cli(base + " --workers 1");
  auto w4 = run_cli(base + " --workers 4");
  REQUIRE(w1.status == 0);
  REQUIRE(w4.status == 0);
  CHECK(w1.output == w4.output);
  CHECK(!w1.output.empty());
  auto parsed = ordered_json::parse(w1.output);
  CHECK(parsed.at("m") == 50);
  CHECK(parsed.contains("mean_inv_sqrt_n"));
  CHECK(parsed.contains("analytic_inv_sqrt_n"));
  CHECK(parsed.contains("expected_lr_simple"));
}

TEST_CASE("cli respects EVSC_ environment variables with flag precedence") {
  std::string tmp = "cli_env_out.tmp";
  std::string base = std::string(EVSCALE_CLI_PATH) + " table 3";
  // env only
  REQUIRE(std::system(("EVSC_FORMAT=csv " + base + " > " + tmp).c_str()) == 0);
  CHECK(slurp(tmp) == golden("table3.csv"));
  // flag beats env
  REQUIRE(std::system(("EVSC_FORMAT=json " + base + " --format csv > " + tmp)
                          .c_str()) == 0);
  CHECK(slurp(tmp) == golden("table3.csv"));
  std::remove(tmp.c_str());
}

TEST_CASE("cli --out writes the payload to a file") {
  std::string tmp = "cli_file_out.tmp";
  auto res = run_cli("table 1 --out " + tmp);
  REQUIRE(res.status == 0);
  CHECK(res.output.empty());
  CHECK(slurp(tmp) == golden("table1.txt"));
  std::remove(tmp.c_str());
}
