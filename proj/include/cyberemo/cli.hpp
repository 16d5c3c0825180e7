#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "error.hpp"
#include "likert.hpp"
#include "logistic.hpp"
#include "observations.hpp"
#include "participation_fit.hpp"
#include "perception_fit.hpp"
#include "posterior.hpp"
#include "serialization.hpp"
#include "simulation.hpp"
#include "synthetic.hpp"

namespace cyberemo::cli {

enum ExitCode : int { ok = 0, validation_error = 1, numerical_error = 2 };

namespace fs = std::filesystem;

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::string params_path;
  int threads = 1;
};

inline ModelParams load_params(const GlobalOptions& g) {
  return g.params_path.empty() ? ModelParams{} : io::params_from_json(io::read_json_file(g.params_path));
}

inline std::ofstream open_out(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("cannot write " + path.string());
  return os;
}

inline void write_json(const fs::path& path, const io::json& j) {
  auto os = open_out(path);
  os << j.dump(2) << '\n';
}

inline std::string agent_file(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "agent_%03zu.csv", i);
  return buf;
}

inline void write_forum(const fs::path& dir, const ForumResult& res) {
  {
    auto os = open_out(dir / "field.csv");
    io::write_field_csv(os, res.field);
  }
  for (std::size_t i = 0; i < res.agents.size(); ++i) {
    auto os = open_out(dir / agent_file(i));
    io::write_trace_csv(os, res.agents[i]);
  }
}

inline void cmd_simulate(const GlobalOptions& g, const std::string& scenario_path, int runs_flag) {
  const auto j = io::read_json_file(scenario_path);
  const ForumScenario scenario = io::forum_from_json(j);
  const IntegratorConfig cfg = io::integrator_from_json(j, g.seed);
  const ModelParams params = load_params(g);
  int runs = j.value("runs", 1);
  if (runs_flag > 0) runs = runs_flag;
  if (runs < 1) throw ValidationError("runs must be >= 1");

  const fs::path out(g.out_dir);
  if (runs == 1) {
    write_forum(out, run_forum(scenario, params, cfg, 0));
    return;
  }
  // Runs are independent substreams, so the output does not depend on the
  // number of worker threads.
  std::atomic<int> next{0};
  std::vector<std::string> errors(static_cast<std::size_t>(runs));
  auto worker = [&] {
    for (int r = next++; r < runs; r = next++) {
      try {
        char name[32];
        std::snprintf(name, sizeof name, "run_%03d", r);
        write_forum(out / name, run_forum(scenario, params, cfg, static_cast<std::uint64_t>(r)));
      } catch (const std::exception& e) {
        errors[static_cast<std::size_t>(r)] = e.what();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (int t = 0; t < std::max(1, g.threads); ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (!e.empty()) throw ValidationError(e);
}

inline void cmd_replay(const GlobalOptions& g, const std::string& scenario_path) {
  const auto j = io::read_json_file(scenario_path);
  const ReplayScenario scenario = io::replay_from_json(j);
  const IntegratorConfig cfg = io::integrator_from_json(j, g.seed);
  const ReplayResult res = replay(scenario, load_params(g), cfg);
  const fs::path out(g.out_dir);
  {
    auto os = open_out(out / "trace.csv");
    io::write_trace_csv(os, res.trace);
  }
  auto os = open_out(out / "boundaries.csv");
  io::write_boundaries_csv(os, res.boundaries);
}

inline void cmd_ingest(const GlobalOptions& g, const std::string& raw_path, std::ostream& err) {
  std::ifstream in(raw_path);
  if (!in) throw ValidationError("cannot open " + raw_path);
  const IngestResult res = ingest(in);
  if (!res.errors.empty()) {
    for (const auto& e : res.errors) err << raw_path << ": " << e << '\n';
    throw ValidationError(std::to_string(res.errors.size()) + " row(s) rejected");
  }
  const fs::path out(g.out_dir);
  {
    auto os = open_out(out / "reports.csv");
    write_reports(os, res.reports);
  }
  auto os = open_out(out / "observations.csv");
  write_observations(os, res.observations);
}

struct FitOptions {
  std::string target;
  bool select = false;
  std::vector<std::string> terms;
  std::string regressor = "valence";
};

inline std::vector<ObservationRecord> load_observations(const std::string& path, std::ostream& err) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  auto set = read_observations(in);
  for (const auto& w : set.warnings) err << "warning: " << w << '\n';
  return std::move(set.records);
}

inline void cmd_fit(const GlobalOptions& g, const std::string& obs_path, const FitOptions& fo, std::ostream& err) {
  const auto data = load_observations(obs_path, err);
  const fs::path out(g.out_dir);
  io::json report;

  if (fo.target == "valence" || fo.target == "arousal") {
    const Target target = fo.target == "valence" ? Target::valence : Target::arousal;
    FittedModel fit;
    if (fo.select) {
      const auto sel = select_terms(data, target);
      for (const auto& w : sel.warnings) err << "warning: " << w << '\n';
      fit = sel.fit;
      report = io::fit_to_json(fit);
      report["selection"] = io::selection_to_json(sel);
    } else {
      std::vector<std::string> terms = fo.terms;
      if (terms.empty())
        terms = target == Target::valence ? std::vector<std::string>{"b0", "b2", "b3"}
                                          : std::vector<std::string>{"d0", "d1"};
      fit = fit_perception(data, target, TermMask::from_names(target, terms));
      report = io::fit_to_json(fit);
    }
    report["target"] = fo.target;
  } else if (fo.target == "participation") {
    report = io::participation_to_json(fit_participation(data));
  } else if (fo.target == "expression") {
    const auto reg = fo.regressor == "arousal" ? ExpressionRegressor::arousal : ExpressionRegressor::valence;
    const auto fit = fit_expression(data, reg);
    report = io::json{{"target", "expression"},
                      {"regressor", fo.regressor},
                      {"models", {{"pos", io::fit_to_json(fit.pos)}, {"neg", io::fit_to_json(fit.neg)}}}};
  } else {
    throw ValidationError("unknown target '" + fo.target + "'");
  }
  write_json(out / ("fit_" + fo.target + ".json"), report);
}

inline void cmd_posterior(const GlobalOptions& g, const std::string& fit_path, std::size_t draws,
                          const std::string& model) {
  const auto in = io::posterior_input_from_json(io::read_json_file(fit_path), model);
  const Posterior post = simulate_posterior(in.estimates, in.covariance, in.names, draws, g.seed);
  const fs::path out(g.out_dir);
  {
    auto os = open_out(out / "posterior_samples.csv");
    io::write_posterior_samples(os, post);
  }
  {
    auto os = open_out(out / "posterior_histograms.csv");
    io::write_posterior_histograms(os, post);
  }
  write_json(out / "posterior_summary.json", io::posterior_summary_to_json(post));
}

inline void cmd_synth(const GlobalOptions& g, std::size_t n) {
  synthetic::Options opt;
  opt.n = n;
  opt.truth = load_params(g);
  const auto ds = synthetic::generate(g.seed, opt);
  auto os = open_out(fs::path(g.out_dir) / "observations.csv");
  write_observations(os, ds.records);
}

// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Valence/arousal agent simulation and parameter estimation", "cyberemo"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--out-dir", g.out_dir, "Directory for all outputs");
  app.add_option("--params", g.params_path, "Model parameter JSON")->check(CLI::ExistingFile);
  app.add_option("--threads", g.threads, "Worker threads for replication batches")->check(CLI::PositiveNumber);

  std::string input;
  int runs = 0;
  auto* simulate = app.add_subcommand("simulate", "Multi-agent forum simulation");
  simulate->add_option("scenario", input, "Forum scenario JSON")->required();
  simulate->add_option("--runs", runs, "Independent replications (overrides the scenario)");

  auto* replay_cmd = app.add_subcommand("replay", "Single-agent replay of a thread sequence");
  replay_cmd->add_option("scenario", input, "Replay scenario JSON")->required();

  auto* ingest_cmd = app.add_subcommand("ingest", "Rescale raw Likert reports into observations");
  ingest_cmd->add_option("raw", input, "Raw Likert CSV")->required();

  FitOptions fo;
  auto* fit = app.add_subcommand("fit", "Estimate model parameters from observations");
  fit->add_option("observations", input, "Observations CSV")->required();
  fit->add_option("--target", fo.target, "Model to fit")
      ->required()
      ->check(CLI::IsMember({"valence", "arousal", "participation", "expression"}));
  fit->add_flag("--select", fo.select, "AIC search over perception terms");
  fit->add_option("--terms", fo.terms, "Perception terms to include (e.g. b0,b2,b3)")->delimiter(',');
  fit->add_option("--regressor", fo.regressor, "Expression regressor")->check(CLI::IsMember({"valence", "arousal"}));

  std::size_t draws = 10000;
  std::string model;
  auto* posterior = app.add_subcommand("posterior", "Simulate the parameter posterior of a fit report");
  posterior->add_option("fit", input, "Fit report JSON")->required();
  posterior->add_option("--draws", draws, "Number of draws")->check(CLI::PositiveNumber);
  posterior->add_option("--model", model, "Model inside a multi-model report (pos/neg)");

  std::size_t synth_n = 1271;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic observations dataset");
  synth->add_option("--n", synth_n, "Number of records")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return validation_error;
  }

  try {
    if (*simulate) cmd_simulate(g, input, runs);
    else if (*replay_cmd) cmd_replay(g, input);
    else if (*ingest_cmd) cmd_ingest(g, input, err);
    else if (*fit) cmd_fit(g, input, fo, err);
    else if (*posterior) cmd_posterior(g, input, draws, model);
    else if (*synth) cmd_synth(g, synth_n);
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return numerical_error;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return validation_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return validation_error;
  }
  return ok;
}

}  // namespace cyberemo::cli
