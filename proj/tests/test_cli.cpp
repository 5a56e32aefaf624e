#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "psun/io.hpp"
#include "psun/svg.hpp"
#include "support/fixtures.hpp"

using namespace psun;
namespace fs = std::filesystem;

namespace {

fs::path test_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "psun_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(PSUN_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  return std::system(cmd.c_str());
}

}  // namespace

TEST_CASE("ingest applies the drop-and-complete-rows protocol") {
  const fs::path csv = test_dir() / "pima_like.csv";
  fixtures::write_pima_like_csv(csv.string());

  IngestOptions opts;
  opts.link = Link::kProbit;
  opts.drop_columns = {"triceps", "insulin"};
  opts.standardize = true;
  opts.add_intercept = true;
  IngestReport report;
  const BinaryDesign d = ingest_csv(csv.string(), opts, &report);
  CHECK(report.rows_total == 768);
  CHECK(report.rows_dropped == 44);
  CHECK(d.n() == 724);
  CHECK(d.p() == 7);  // intercept + 6 covariates
  CHECK(d.names[0] == "intercept");
  CHECK(d.names[1] == "pregnant");
}

TEST_CASE("ingest handles the expression-shaped file") {
  const fs::path csv = test_dir() / "sage_like.csv";
  fixtures::write_expression_like_csv(csv.string());
  IngestOptions opts;
  opts.link = Link::kLogit;
  opts.standardize = true;
  opts.add_intercept = false;
  const BinaryDesign d = ingest_csv(csv.string(), opts);
  CHECK(d.n() == 74);
  CHECK(d.p() == 516);
}

TEST_CASE("ingest drops NA rows and rejects malformed input") {
  const fs::path csv = test_dir() / "small_na.csv";
  fixtures::write_small_na_csv(csv.string());
  IngestOptions opts;
  IngestReport report;
  const BinaryDesign d = ingest_csv(csv.string(), opts, &report);
  CHECK(d.n() == 9);
  CHECK(report.rows_dropped == 1);

  const fs::path bad = test_dir() / "bad_y.csv";
  write_text_file(bad.string(), "x,y\n1.0,2\n");
  CHECK_THROWS(ingest_csv(bad.string(), opts));

  const fs::path allna = test_dir() / "allna.csv";
  write_text_file(allna.string(), "x,y\nNA,1\nNA,0\n");
  CHECK_THROWS(ingest_csv(allna.string(), opts));

  const fs::path noresp = test_dir() / "noresp.csv";
  write_text_file(noresp.string(), "x,z\n1,2\n");
  CHECK_THROWS(ingest_csv(noresp.string(), opts));
}

TEST_CASE("draws round-trip bit-exactly through CSV") {
  RngStream rng(7);
  DrawMatrix dm;
  dm.draws.resize(500, 3);
  for (int i = 0; i < 500; ++i)
    for (int j = 0; j < 3; ++j) dm.draws(i, j) = rng.normal() * std::pow(10.0, j - 1);
  dm.chain.assign(500, 0);
  for (int i = 250; i < 500; ++i) dm.chain[i] = 1;
  dm.names = {"a", "b", "c"};

  const fs::path path = test_dir() / "draws_roundtrip.csv";
  write_draws_csv(path.string(), dm);
  const DrawMatrix back = read_draws_csv(path.string());
  CHECK(back.draws == dm.draws);
  CHECK(back.chain == dm.chain);
  CHECK(back.names == dm.names);

  // Identical draws produce an identical summary serialization.
  CHECK(summary_to_json(summarize(back)) == summary_to_json(summarize(dm)));
}

TEST_CASE("cli fit is deterministic and diagnose reproduces its summary") {
  const fs::path csv = test_dir() / "fit_input.csv";
  fixtures::write_small_na_csv(csv.string());
  const fs::path out1 = test_dir() / "fit1";
  const fs::path out2 = test_dir() / "fit2";

  const std::string common_args =
      "fit --data " + csv.string() +
      " --link probit --prior gaussian --intercept --iters 800 --burnin 100 --chains 2 --seed 7";
  REQUIRE(run_cli(common_args + " --out " + out1.string() + " --plots") == 0);
  REQUIRE(run_cli(common_args + " --out " + out2.string()) == 0);

  CHECK(slurp(out1 / "draws.csv") == slurp(out2 / "draws.csv"));
  CHECK(fs::exists(out1 / "summary.json"));
  CHECK(fs::exists(out1 / "metadata.json"));
  CHECK(fs::exists(out1 / "trace.svg"));
  CHECK(fs::exists(out1 / "acf.svg"));
  CHECK(slurp(out1 / "trace.svg").find("<svg") != std::string::npos);

  const fs::path diag = test_dir() / "diag";
  REQUIRE(run_cli("diagnose --draws " + (out1 / "draws.csv").string() + " --out " +
                  diag.string()) == 0);
  CHECK(slurp(diag / "summary.json") == slurp(out1 / "summary.json"));
}

TEST_CASE("cli rejects a missing seed") {
  const fs::path csv = test_dir() / "fit_input2.csv";
  fixtures::write_small_na_csv(csv.string());
  CHECK(run_cli("fit --data " + csv.string() + " --out " + (test_dir() / "noseed").string()) !=
        0);
}

TEST_CASE("cli prior-sample draws from the recipe") {
  const fs::path out = test_dir() / "prior";
  REQUIRE(run_cli("prior-sample --p 3 --link probit --prior laplace --draws 4000 --seed 21 "
                  "--out " +
                  out.string()) == 0);
  const DrawMatrix dm = read_draws_csv((out / "draws.csv").string());
  CHECK(dm.draws.rows() == 4000);
  CHECK(dm.draws.cols() == 3);
  // probit-laplace recipe: intercept variance 100, slopes 6.25; Laplace
  // mixing doubles the variance of each coefficient.
  const double v0 = dm.draws.col(0).squaredNorm() / 4000.0;
  const double v1 = dm.draws.col(1).squaredNorm() / 4000.0;
  CHECK(v0 == doctest::Approx(200.0).epsilon(0.15));
  CHECK(v1 == doctest::Approx(12.5).epsilon(0.15));
}

TEST_CASE("cli marginal emits the estimate schema") {
  const fs::path csv = test_dir() / "marg_input.csv";
  fixtures::write_small_na_csv(csv.string());
  const fs::path out = test_dir() / "marg";
  REQUIRE(run_cli("marginal --data " + csv.string() +
                  " --link logit --prior laplace --intercept --n-mc 500 --seed 11 --out " +
                  out.string()) == 0);
  const std::string j = slurp(out / "marginal.json");
  CHECK(j.find("log_marginal") != std::string::npos);
  CHECK(j.find("std_err") != std::string::npos);
}

TEST_CASE("cli coverage-study produces the 19-level table") {
  const fs::path out = test_dir() / "study";
  REQUIRE(run_cli("coverage-study --reps 6 --n 15 --p 3 --combos probit-gaussian --iters 600 "
                  "--burnin 100 --threads 2 --seed 13 --out " +
                  out.string() + " --plots") == 0);
  const std::string csv = slurp(out / "coverage.csv");
  std::stringstream ss(csv);
  std::string header;
  std::getline(ss, header);
  int commas = 0;
  for (char c : header) commas += c == ',';
  CHECK(commas == 2 + 19);  // combo,group,reps_used + 19 levels
  CHECK(fs::exists(out / "coverage.svg"));
}

TEST_CASE("cli error path writes machine-readable json and exits nonzero") {
  const fs::path out = test_dir() / "err";
  CHECK(run_cli("fit --data /nonexistent.csv --seed 3 --out " + out.string()) != 0);
  const std::string err = slurp(out / "error.json");
  CHECK(err.find("\"error\"") != std::string::npos);
  CHECK(err.find("message") != std::string::npos);
}

TEST_CASE("cli config file fills defaults but flags win") {
  const fs::path csv = test_dir() / "cfg_input.csv";
  fixtures::write_small_na_csv(csv.string());
  const fs::path cfg = test_dir() / "cfg.json";
  write_text_file(cfg.string(), "{\"iters\": 700, \"burnin\": 100, \"link\": \"logit\"}\n");
  const fs::path out_a = test_dir() / "cfg_a";
  REQUIRE(run_cli("fit --data " + csv.string() + " --prior gaussian --intercept --config " +
                  cfg.string() + " --seed 5 --out " + out_a.string()) == 0);
  const std::string meta = slurp(out_a / "metadata.json");
  CHECK(meta.find("\"iters\": 700") != std::string::npos);
  CHECK(meta.find("\"link\": \"logit\"") != std::string::npos);

  const fs::path out_b = test_dir() / "cfg_b";
  REQUIRE(run_cli("fit --data " + csv.string() + " --prior gaussian --intercept --config " +
                  cfg.string() + " --iters 900 --seed 5 --out " + out_b.string()) == 0);
  CHECK(slurp(out_b / "metadata.json").find("\"iters\": 900") != std::string::npos);
}
