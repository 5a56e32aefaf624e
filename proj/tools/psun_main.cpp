// Command-line front end: fit, prior-sample, coverage-study, marginal,
// diagnose. All randomness flows from --seed; outputs are draws.csv,
// summary.json, metadata.json, and optional SVG charts in --out.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "psun/diagnostics.hpp"
#include "psun/io.hpp"
#include "psun/regression.hpp"
#include "psun/simstudy.hpp"
#include "psun/svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
  std::string out_dir;
  std::uint64_t seed = 0;
  bool plots = false;
  std::string config_path;
};

psun::Link parse_link(const std::string& s) {
  if (s == "probit") return psun::Link::kProbit;
  if (s == "logit") return psun::Link::kLogit;
  throw CLI::ValidationError("--link", "must be probit or logit");
}

psun::PriorFamily parse_family(const std::string& s) {
  if (s == "gaussian") return psun::PriorFamily::kGaussian;
  if (s == "laplace") return psun::PriorFamily::kLaplaceIndep;
  if (s == "cauchy") return psun::PriorFamily::kCauchy;
  if (s == "dl") return psun::PriorFamily::kDirichletLaplace;
  if (s == "gaussian-sage") return psun::PriorFamily::kGaussianSage;
  throw CLI::ValidationError("--prior", "must be gaussian, laplace, cauchy, dl, or gaussian-sage");
}

// Builds the prior: recipe defaults, overridden by explicit omega values.
psun::PriorSpec make_prior(psun::Link link, const std::string& family_s, int p,
                           std::optional<double> omega_intercept,
                           std::optional<double> omega_slope) {
  const psun::PriorFamily family = parse_family(family_s);
  psun::PriorSpec prior;
  if (family == psun::PriorFamily::kCauchy) {
    if (!omega_intercept || !omega_slope)
      throw std::invalid_argument(
          "the cauchy prior has no default omega values; pass --omega-intercept and "
          "--omega-slope");
    prior.family = family;
    Eigen::VectorXd diag = Eigen::VectorXd::Constant(p, *omega_slope);
    diag[0] = *omega_intercept;
    prior.omega = diag.asDiagonal();
    prior.xi = Eigen::VectorXd::Zero(p);
    return prior;
  }
  prior = psun::prior_from_recipe(link, family, p);
  if (omega_intercept || omega_slope) {
    if (family == psun::PriorFamily::kDirichletLaplace)
      throw std::invalid_argument("the dirichlet-laplace prior fixes omega = I");
    Eigen::VectorXd diag = prior.omega.diagonal();
    if (omega_slope) diag.tail(p - 1).setConstant(*omega_slope);
    if (omega_intercept) diag[0] = *omega_intercept;
    prior.omega = diag.asDiagonal();
  }
  return prior;
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  json j;
  in >> j;
  return j;
}

// Config-file values fill in options the user did not pass on the command
// line; explicit flags always win.
template <typename T>
void merge_config(const CLI::App& app, const json& cfg, const std::string& flag,
                  const std::string& key, T& value) {
  const CLI::Option* opt = app.get_option_no_throw(flag);
  if (opt != nullptr && opt->count() > 0) return;
  if (cfg.contains(key)) value = cfg.at(key).get<T>();
}

void write_metadata(const fs::path& dir, const std::string& command, std::uint64_t seed,
                    const json& effective_config) {
  json meta;
  meta["command"] = command;
  meta["seed"] = seed;
  meta["config"] = effective_config;
  meta["config_hash"] = std::hash<std::string>{}(effective_config.dump());
  meta["revision"] = PSUN_GIT_REV;
  psun::write_text_file((dir / "metadata.json").string(), meta.dump(2));
}

void write_error_json(const std::string& out_dir, const std::string& command,
                      const std::string& message) {
  json err;
  err["error"] = true;
  err["command"] = command;
  err["message"] = message;
  if (!out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (!ec) {
      std::ofstream out(fs::path(out_dir) / "error.json");
      out << err.dump(2) << '\n';
    }
  }
  std::cerr << err.dump() << '\n';
}

void emit_fit_outputs(const fs::path& dir, const psun::DrawMatrix& draws, bool plots) {
  psun::write_draws_csv((dir / "draws.csv").string(), draws);
  const psun::ChainSummary summary = psun::summarize(draws);
  psun::write_summary_json((dir / "summary.json").string(), summary);
  if (plots) {
    psun::write_trace_svg((dir / "trace.svg").string(), draws);
    psun::write_acf_svg((dir / "acf.svg").string(), summary);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pSUN Bayesian binary regression"};
  app.require_subcommand(1);

  CommonOpts common;

  // ---- fit ----------------------------------------------------------------
  auto* fit = app.add_subcommand("fit", "Fit a binary regression by Gibbs sampling");
  std::string data_path, link_s = "probit", prior_s = "gaussian", response = "y";
  std::vector<std::string> drop_cols;
  bool do_standardize = false, add_intercept = false;
  long iters = 10000, burnin = 1000;
  int thin = 1, chains = 1, threads = 0;
  int exact_tmvn_dim = 200, kernel_sweeps = 5;
  std::optional<double> omega_intercept, omega_slope;
  fit->add_option("--data", data_path, "CSV file with a binary response column");
  fit->add_option("--link", link_s, "probit or logit");
  fit->add_option("--prior", prior_s, "gaussian, laplace, cauchy, dl, or gaussian-sage");
  fit->add_option("--response", response, "response column name (default y)");
  fit->add_option("--drop", drop_cols, "columns to drop before fitting")->delimiter(',');
  fit->add_flag("--standardize", do_standardize, "center covariates, rescale to sd 0.5");
  fit->add_flag("--intercept", add_intercept, "prepend an intercept column");
  fit->add_option("--iters", iters);
  fit->add_option("--burnin", burnin);
  fit->add_option("--thin", thin);
  fit->add_option("--chains", chains);
  fit->add_option("--threads", threads, "max worker threads (0 = hardware)");
  fit->add_option("--exact-tmvn-dim", exact_tmvn_dim,
                  "largest dimension drawn with the exact truncated-normal sampler");
  fit->add_option("--kernel-sweeps", kernel_sweeps, "coordinate sweeps of the fallback kernel");
  fit->add_option("--omega-intercept", omega_intercept, "prior variance of the intercept");
  fit->add_option("--omega-slope", omega_slope, "prior variance of the other coefficients");
  fit->add_option("--seed", common.seed, "random seed (required)")->required();
  fit->add_option("--out", common.out_dir, "output directory")->required();
  fit->add_flag("--plots", common.plots, "emit trace.svg and acf.svg");
  fit->add_option("--config", common.config_path, "JSON config file (flags take precedence)");

  // ---- prior-sample --------------------------------------------------------
  auto* prior_cmd = app.add_subcommand("prior-sample", "Draw coefficients from a prior recipe");
  int prior_p = 2;
  long prior_draws = 10000;
  prior_cmd->add_option("--p", prior_p, "number of coefficients")->required();
  prior_cmd->add_option("--link", link_s);
  prior_cmd->add_option("--prior", prior_s);
  prior_cmd->add_option("--draws", prior_draws);
  prior_cmd->add_option("--omega-intercept", omega_intercept);
  prior_cmd->add_option("--omega-slope", omega_slope);
  prior_cmd->add_option("--seed", common.seed)->required();
  prior_cmd->add_option("--out", common.out_dir)->required();
  prior_cmd->add_flag("--plots", common.plots);
  prior_cmd->add_option("--config", common.config_path);

  // ---- coverage-study --------------------------------------------------------
  auto* study = app.add_subcommand("coverage-study", "Frequentist coverage simulation");
  int reps = 500, study_n = 25, study_p = 10;
  std::vector<std::string> combo_names;
  study->add_option("--reps", reps, "number of simulation reps (full scale: 10000)");
  study->add_option("--n", study_n);
  study->add_option("--p", study_p);
  study->add_option("--combos", combo_names,
                    "subset of logit-gaussian,logit-laplace,logit-dl,probit-laplace,probit-dl; "
                    "a *-cauchy combo needs --omega-intercept/--omega-slope")
      ->delimiter(',');
  study->add_option("--omega-intercept", omega_intercept);
  study->add_option("--omega-slope", omega_slope);
  study->add_option("--iters", iters);
  study->add_option("--burnin", burnin);
  study->add_option("--threads", threads);
  study->add_option("--seed", common.seed)->required();
  study->add_option("--out", common.out_dir)->required();
  study->add_flag("--plots", common.plots);
  study->add_option("--config", common.config_path);

  // ---- marginal --------------------------------------------------------------
  auto* marginal = app.add_subcommand("marginal", "Estimate the marginal likelihood P(Y = y)");
  long n_mc = 4000;
  marginal->add_option("--data", data_path)->required();
  marginal->add_option("--link", link_s);
  marginal->add_option("--prior", prior_s);
  marginal->add_option("--response", response);
  marginal->add_option("--drop", drop_cols)->delimiter(',');
  marginal->add_flag("--standardize", do_standardize);
  marginal->add_flag("--intercept", add_intercept);
  marginal->add_option("--n-mc", n_mc);
  marginal->add_option("--omega-intercept", omega_intercept);
  marginal->add_option("--omega-slope", omega_slope);
  marginal->add_option("--seed", common.seed)->required();
  marginal->add_option("--out", common.out_dir)->required();
  marginal->add_option("--config", common.config_path);

  // ---- diagnose --------------------------------------------------------------
  auto* diagnose = app.add_subcommand("diagnose", "Summaries and charts for stored draws");
  std::string draws_path;
  diagnose->add_option("--draws", draws_path, "draws.csv produced by fit")->required();
  diagnose->add_option("--out", common.out_dir)->required();
  diagnose->add_flag("--plots", common.plots);

  std::string active = "";
  try {
    app.parse(argc, argv);
    CLI::App* sub = app.get_subcommands().front();
    active = sub->get_name();
    const json cfg = load_config(common.config_path);
    merge_config(*sub, cfg, "--link", "link", link_s);
    merge_config(*sub, cfg, "--prior", "prior", prior_s);
    merge_config(*sub, cfg, "--iters", "iters", iters);
    merge_config(*sub, cfg, "--burnin", "burnin", burnin);
    merge_config(*sub, cfg, "--thin", "thin", thin);
    merge_config(*sub, cfg, "--chains", "chains", chains);
    merge_config(*sub, cfg, "--threads", "threads", threads);
    merge_config(*sub, cfg, "--exact-tmvn-dim", "exact_tmvn_dim", exact_tmvn_dim);
    merge_config(*sub, cfg, "--kernel-sweeps", "kernel_sweeps", kernel_sweeps);
    merge_config(*sub, cfg, "--reps", "reps", reps);
    merge_config(*sub, cfg, "--n", "n", study_n);
    merge_config(*sub, cfg, "--p", "p", study_p);
    merge_config(*sub, cfg, "--n-mc", "n_mc", n_mc);

    const fs::path out_dir(common.out_dir);
    fs::create_directories(out_dir);

    json effective;
    effective["link"] = link_s;
    effective["prior"] = prior_s;

    if (active == "fit") {
      if (data_path.empty()) throw std::invalid_argument("fit: --data is required");
      psun::IngestOptions opts;
      opts.link = parse_link(link_s);
      opts.response = response;
      opts.drop_columns = drop_cols;
      opts.standardize = do_standardize;
      opts.add_intercept = add_intercept;
      psun::IngestReport report;
      const psun::BinaryDesign design = psun::ingest_csv(data_path, opts, &report);
      const psun::PriorSpec prior =
          make_prior(opts.link, prior_s, design.p(), omega_intercept, omega_slope);
      psun::FitConfig fc;
      fc.iters = iters;
      fc.burnin = burnin;
      fc.thin = thin;
      fc.chains = chains;
      fc.seed = common.seed;
      fc.max_threads = threads;
      fc.gibbs.exact_tmvn_max_dim = exact_tmvn_dim;
      fc.gibbs.kernel_sweeps = kernel_sweeps;
      const psun::DrawMatrix draws = psun::fit_gibbs(design, prior, fc);
      emit_fit_outputs(out_dir, draws, common.plots);
      effective["data"] = data_path;
      effective["n"] = design.n();
      effective["p"] = design.p();
      effective["rows_dropped"] = report.rows_dropped;
      effective["iters"] = iters;
      effective["burnin"] = burnin;
      effective["thin"] = thin;
      effective["chains"] = chains;
      write_metadata(out_dir, active, common.seed, effective);
      std::cout << "wrote " << draws.draws.rows() << " draws for " << design.p()
                << " coefficients (dropped " << report.rows_dropped << " incomplete rows)\n";
    } else if (active == "prior-sample") {
      const psun::Link link = parse_link(link_s);
      const psun::PriorSpec prior =
          make_prior(link, prior_s, prior_p, omega_intercept, omega_slope);
      psun::RngStream rng(common.seed);
      const psun::MixingLaw law = prior.w_law(prior_p);
      psun::DrawMatrix dm;
      dm.seed = common.seed;
      dm.draws.resize(prior_draws, prior_p);
      dm.chain.assign(prior_draws, 0);
      const Eigen::LLT<Eigen::MatrixXd> llt(prior.omega);
      const bool diag = prior.omega.isDiagonal(1e-14);
      for (long i = 0; i < prior_draws; ++i) {
        const Eigen::VectorXd w = psun::sample_prior(law, rng);
        Eigen::VectorXd nrm(prior_p);
        for (int j = 0; j < prior_p; ++j) nrm[j] = rng.normal();
        if (diag) {
          dm.draws.row(i) =
              (prior.omega.diagonal().cwiseProduct(w)).cwiseSqrt().cwiseProduct(nrm).transpose();
        } else {
          dm.draws.row(i) = (w.cwiseSqrt().asDiagonal() * (llt.matrixL() * nrm)).transpose();
        }
      }
      for (int j = 0; j < prior_p; ++j) dm.names.push_back("beta_" + std::to_string(j + 1));
      emit_fit_outputs(out_dir, dm, common.plots);
      effective["p"] = prior_p;
      effective["draws"] = prior_draws;
      write_metadata(out_dir, active, common.seed, effective);
      std::cout << "wrote " << prior_draws << " prior draws\n";
    } else if (active == "coverage-study") {
      psun::StudyConfig sc;
      sc.g_reps = reps;
      sc.n = study_n;
      sc.p = study_p;
      sc.gibbs_iters = iters;
      sc.burnin = burnin;
      sc.seed = common.seed;
      sc.max_threads = threads;
      if (!combo_names.empty()) {
        sc.combos.clear();
        for (const std::string& name : combo_names) {
          const auto dash = name.find('-');
          if (dash == std::string::npos)
            throw std::invalid_argument("combo name must look like logit-gaussian");
          psun::StudyCombo combo = psun::make_combo(parse_link(name.substr(0, dash)),
                                                    parse_family(name.substr(dash + 1)));
          if (combo.family == psun::PriorFamily::kCauchy) {
            if (!omega_intercept || !omega_slope)
              throw std::invalid_argument(
                  "a cauchy combo needs --omega-intercept and --omega-slope");
            Eigen::VectorXd diag = Eigen::VectorXd::Constant(study_p, *omega_slope);
            diag[0] = *omega_intercept;
            combo.omega_override = diag.asDiagonal();
          }
          sc.combos.push_back(std::move(combo));
        }
      }
      const psun::CoverageTable table = psun::run_study(sc);
      psun::write_coverage_csv((out_dir / "coverage.csv").string(), table);
      if (common.plots) psun::write_coverage_svg((out_dir / "coverage.svg").string(), table);
      effective["reps"] = reps;
      effective["n"] = study_n;
      effective["p"] = study_p;
      effective["iters"] = iters;
      effective["failures"] = table.failures;
      write_metadata(out_dir, active, common.seed, effective);
      const double failure_rate =
          static_cast<double>(table.failures) / (reps * static_cast<int>(sc.combos.size()));
      std::cout << "coverage table written (" << table.rows.size() << " rows, failure rate "
                << failure_rate << ")\n";
      if (failure_rate >= 0.01) throw std::runtime_error("per-rep failure rate exceeded 1%");
    } else if (active == "marginal") {
      psun::IngestOptions opts;
      opts.link = parse_link(link_s);
      opts.response = response;
      opts.drop_columns = drop_cols;
      opts.standardize = do_standardize;
      opts.add_intercept = add_intercept;
      const psun::BinaryDesign design = psun::ingest_csv(data_path, opts);
      const psun::PriorSpec prior =
          make_prior(opts.link, prior_s, design.p(), omega_intercept, omega_slope);
      psun::RngStream rng(common.seed);
      const psun::LogProbEstimate est =
          psun::log_marginal_likelihood(design, prior, static_cast<int>(n_mc), rng);
      json out;
      out["log_marginal"] = est.log_value;
      out["marginal"] = est.value();
      out["std_err"] = est.std_err();
      out["rel_std_err"] = est.rel_std_err;
      out["n_mc"] = n_mc;
      psun::write_text_file((out_dir / "marginal.json").string(), out.dump(2));
      effective["data"] = data_path;
      effective["n_mc"] = n_mc;
      write_metadata(out_dir, active, common.seed, effective);
      std::cout << "log marginal likelihood " << est.log_value << " (rel se " << est.rel_std_err
                << ")\n";
    } else if (active == "diagnose") {
      const psun::DrawMatrix draws = psun::read_draws_csv(draws_path);
      const psun::ChainSummary summary = psun::summarize(draws);
      psun::write_summary_json((out_dir / "summary.json").string(), summary);
      if (common.plots) {
        psun::write_trace_svg((out_dir / "trace.svg").string(), draws);
        psun::write_acf_svg((out_dir / "acf.svg").string(), summary);
      }
      json effective2;
      effective2["draws"] = draws_path;
      write_metadata(out_dir, active, common.seed, effective2);
      std::cout << "summarized " << draws.draws.rows() << " draws\n";
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    write_error_json(common.out_dir, active, e.what());
    return 1;
  }
}
