#include "otnet/cli.hpp"
#include "otnet/serialization.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace otnet;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path dir() {
  static const fs::path d = [] {
    const fs::path p = fs::temp_directory_path() / "otnet_test_cli";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return d;
}

std::string path(const std::string& name) { return (dir() / name).string(); }

std::string slurp(const std::string& file) {
  std::ifstream in(file);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

void write(const std::string& file, const std::string& text) { write_text_file(file, text); }

json error_record(const Result& r) {
  EXPECT_EQ(lines(r.err).size(), 1u) << r.err;
  return json::parse(r.err);
}

}  // namespace

TEST(Cli, RateSweepDefaultShape) {
  const auto r = run({"rate-sweep", "--output", path("sweep.csv"), "--slope-output", path("slopes.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(slurp(path("sweep.csv")));
  ASSERT_EQ(rows.size(), 1u + 5 * 7);
  EXPECT_EQ(rows[0], "metric,d,n,replicate,value,seed");
  EXPECT_EQ(rows[1].substr(0, 9), "mmd,2,64,");
  const json slopes = read_json_file(path("slopes.json"));
  EXPECT_EQ(slopes["fits"].size(), 1u);
  EXPECT_EQ(slopes["meta"]["seed"], 0);
  EXPECT_EQ(slopes["meta"]["config_hash"].get<std::string>().size(), 16u);
  EXPECT_TRUE(slopes.contains("caveat"));
}

TEST(Cli, RateSweepIsByteReproducible) {
  const std::vector<std::string> base = {"rate-sweep", "--metric", "ksd", "--dims", "1,2", "--n-grid", "16,32,64",
                                         "--replicates", "3", "--seed", "5"};
  auto a = base, b = base;
  a.insert(a.end(), {"--output", path("ksd_a.csv"), "--slope-output", path("ksd_a.json"), "--workers", "1"});
  b.insert(b.end(), {"--output", path("ksd_b.csv"), "--slope-output", path("ksd_b.json"), "--workers", "3"});
  ASSERT_EQ(run(a).code, 0);
  ASSERT_EQ(run(b).code, 0);
  EXPECT_EQ(slurp(path("ksd_a.csv")), slurp(path("ksd_b.csv")));
  EXPECT_EQ(lines(slurp(path("ksd_a.csv"))).size(), 1u + 2 * 3 * 3);
  const auto fits_a = read_json_file(path("ksd_a.json"))["fits"];
  const auto fits_b = read_json_file(path("ksd_b.json"))["fits"];
  EXPECT_EQ(fits_a, fits_b);
}

TEST(Cli, CompileNetDepthForSavedReport) {
  const auto nu = empirical_measure(sample(TargetSpec::standard_normal(2), 256, std::uint64_t{3}));
  SolveReport report;
  report.psi = DualPotential::zeros(256);
  write(path("report256.json"), to_json(report, nu).dump());
  const auto r = run({"compile-net", "--solve-report", path("report256.json"), "--output", path("net256.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json net = read_json_file(path("net256.json"));
  EXPECT_EQ(net["depth"], 8);
  EXPECT_EQ(net["n"], 256);
  EXPECT_EQ(net["widths"][0], 384);
  EXPECT_TRUE(net["meta"].contains("config_hash"));
}

TEST(Cli, SolveCompileEvalRoundTrip) {
  const auto solve = run({"solve-ot", "--n", "8", "--seed", "2", "--step0", "5", "--grad-tol", "0.004",
                          "--output", path("solve8.json")});
  ASSERT_EQ(solve.code, 0) << solve.err;
  const json report = read_json_file(path("solve8.json"));
  EXPECT_TRUE(report["converged"].get<bool>());
  EXPECT_EQ(report["psi"].size(), 8u);
  EXPECT_EQ(report["meta"]["seed"], 2);

  ASSERT_EQ(run({"compile-net", "--solve-report", path("solve8.json"), "--output", path("net8.json")}).code, 0);

  // Reference forward pass on the in-memory network, before any file round trip.
  const auto loaded = solve_report_from_json(report);
  const BrenierNetwork original(brenier_coefficients(loaded.nu, loaded.report.psi));
  const PointSet x = sample(SourceSpec::standard_gaussian(2), 100, std::uint64_t{9});
  write_points_csv(path("inputs.csv"), x);
  const auto eval = run({"eval-net", "--network", path("net8.json"), "--inputs", path("inputs.csv"), "--output",
                         path("eval.csv")});
  ASSERT_EQ(eval.code, 0) << eval.err;
  const auto rows = lines(slurp(path("eval.csv")));
  ASSERT_EQ(rows.size(), 101u);
  EXPECT_EQ(rows[0], "value,grad0,grad1");
  for (Index i = 0; i < 100; ++i) {
    std::stringstream ss(rows[static_cast<std::size_t>(i + 1)]);
    std::string cell;
    std::getline(ss, cell, ',');
    EXPECT_EQ(std::strtod(cell.c_str(), nullptr), original.net.forward(x.row(i).transpose()));
    const Vector g = gradient(original.coeffs, x.row(i).transpose());
    for (Index k = 0; k < 2; ++k) {
      std::getline(ss, cell, ',');
      EXPECT_EQ(std::strtod(cell.c_str(), nullptr), g(k));
    }
  }
}

TEST(Cli, MetricsRecords) {
  const PointSet x = sample(TargetSpec::standard_normal(2), 64, std::uint64_t{4});
  write_points_csv(path("samples.csv"), x);
  const auto r = run({"metrics", "--samples", path("samples.csv"), "--metrics", "w1,mmd,ksd", "--seed", "7",
                      "--kernel", "imq", "--imq-beta", "-0.3", "--output", path("metrics.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json recs = read_json_file(path("metrics.json"));
  ASSERT_EQ(recs.size(), 3u);
  for (const auto& rec : recs) {
    EXPECT_EQ(rec["n"], 64);
    EXPECT_EQ(rec["d"], 2);
    EXPECT_EQ(rec["seed"], 7);
    EXPECT_EQ(rec["config_hash"].get<std::string>().size(), 16u);
    EXPECT_GT(rec["value"].get<double>(), 0.0);
  }
  EXPECT_EQ(recs[1]["kernel"]["kind"], "imq");
  EXPECT_EQ(recs[1]["kernel"]["beta"], -0.3);
  EXPECT_EQ(recs[1]["estimator"], "biased");
  EXPECT_NEAR(recs[2]["value"].get<double>(), ksd(x, TargetSpec::standard_normal(2), Kernel::imq(1.0, -0.3)), 1e-11);

  // Same inputs, same bytes.
  const std::string first = slurp(path("metrics.json"));
  ASSERT_EQ(run({"metrics", "--samples", path("samples.csv"), "--metrics", "w1,mmd,ksd", "--seed", "7", "--kernel",
                 "imq", "--imq-beta", "-0.3", "--output", path("metrics.json")})
                .code,
            0);
  EXPECT_EQ(slurp(path("metrics.json")), first);
}

TEST(Cli, ConfigFileWithOverrides) {
  write(path("cfg.json"), R"({"sweep": {"metric": "w1", "dims": [1], "n_grid": [8, 16], "replicates": 3},
                              "seed": 11})");
  const auto r = run({"rate-sweep", "--config", path("cfg.json"), "--replicates", "4", "--output", path("w1.csv"),
                      "--slope-output", path("w1.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(slurp(path("w1.csv")));
  EXPECT_EQ(rows.size(), 1u + 2 * 4);
  EXPECT_EQ(rows[1].substr(0, 8), "w1,1,8,0");
  EXPECT_EQ(rows[1].substr(rows[1].size() - 3), ",11");
  const json meta = read_json_file(path("w1.json"))["meta"];
  EXPECT_EQ(meta["config"]["sweep"]["replicates"], 4);
  EXPECT_EQ(meta["config"]["sweep"]["metric"], "w1");
}

TEST(Cli, ExitCodes) {
  write(path("unknown_key.json"), R"({"sweep": {"metric": "mmd", "bogus": 1}})");
  auto r = run({"rate-sweep", "--config", path("unknown_key.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(error_record(r)["exit_code"], 2);

  write(path("top_unknown.json"), R"({"colour": "blue"})");
  EXPECT_EQ(run({"metrics", "--config", path("top_unknown.json")}).code, 2);

  write(path("broken.json"), "{ not json");
  EXPECT_EQ(run({"rate-sweep", "--config", path("broken.json")}).code, 2);

  r = run({"rate-sweep", "--no-such-flag", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(error_record(r)["error"], "config");
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"rate-sweep", "--replicates", "three"}).code, 2);

  r = run({"rate-sweep", "--replicates", "2", "--output", path("x.csv"), "--slope-output", path("x.json")});
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(error_record(r)["error"], "validation");

  r = run({"solve-ot", "--n", "16", "--max-iters", "10", "--check-every", "10", "--grad-tol", "1e-6", "--output",
           path("nc.json")});
  EXPECT_EQ(r.code, 4);
  EXPECT_EQ(error_record(r)["error"], "non_convergence");
  EXPECT_FALSE(read_json_file(path("nc.json"))["converged"].get<bool>());

  r = run({"eval-net", "--network", path("does_not_exist.json"), "--inputs", path("inputs.csv")});
  EXPECT_EQ(r.code, 5);
  EXPECT_EQ(error_record(r)["error"], "io");
}

TEST(Cli, HelpListsEveryFlag) {
  const auto top = run({"--help"});
  EXPECT_EQ(top.code, 0);
  for (const char* cmd : {"solve-ot", "compile-net", "eval-net", "metrics", "rate-sweep", "end-to-end"}) {
    EXPECT_NE(top.out.find(cmd), std::string::npos) << cmd;
  }
  EXPECT_NE(top.out.find("Exit codes"), std::string::npos);
  const auto sweep = run({"rate-sweep", "--help"});
  EXPECT_EQ(sweep.code, 0);
  for (const char* flag : {"--config", "--seed", "--workers", "--metric", "--dims", "--n-grid", "--replicates",
                           "--reference-size", "--kernel", "--bandwidth", "--imq-c", "--imq-beta", "--slope-output"}) {
    EXPECT_NE(sweep.out.find(flag), std::string::npos) << flag;
  }
  const auto e2e = run({"end-to-end", "--help"});
  for (const char* flag : {"--n", "--mc-batch", "--max-iters", "--step0", "--grad-tol", "--averaging",
                           "--validation-batch", "--check-every", "--eval-size", "--metric-size", "--network-output"}) {
    EXPECT_NE(e2e.out.find(flag), std::string::npos) << flag;
  }
}
