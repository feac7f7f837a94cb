// wrenchgrasp command-line interface.
#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wrenchgrasp/errors.hpp"
#include "wrenchgrasp/harness.hpp"
#include "wrenchgrasp/io.hpp"
#include "wrenchgrasp/random.hpp"
#include "wrenchgrasp/scenario.hpp"
#include "wrenchgrasp/surrogate.hpp"

namespace wg = wrenchgrasp;
using nlohmann::json;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string config;
  unsigned threads = 0;
  json settings = json::object();
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw wg::InvalidInput("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw wg::InvalidInput("cannot write " + path);
  out << text;
}

// Optional settings document passed with --config:
//   {"threads": n, "cost": {"w_tau_per_nm", "w_s_per_n", "w_alpha_per_rad"},
//    "dataset": {"scenarios", "candidates_per_scenario"},
//    "train": {"epochs", "learning_rate", "momentum", "batch_size", "hidden",
//              "optimizer", "clip_norm"}}
void load_config(Globals& g) {
  if (g.config.empty()) return;
  try {
    g.settings = json::parse(read_file(g.config));
  } catch (const json::exception& e) {
    throw wg::ParseError("config", e.what());
  }
  if (!g.settings.is_object()) throw wg::ParseError("config", "expected an object");
  if (g.settings.contains("threads")) g.threads = g.settings["threads"].get<unsigned>();
}

template <typename T>
void setting(const Globals& g, const char* section, const char* key, T& out) {
  if (g.settings.contains(section) && g.settings[section].contains(key)) {
    try {
      out = g.settings[section][key].get<T>();
    } catch (const json::exception& e) {
      throw wg::ParseError(std::string("config.") + section + "." + key, e.what());
    }
  }
}

wg::Scenario scenario(const Globals& g, const std::string& path) {
  wg::Scenario s = wg::load_scenario(path);
  if (g.seed) s.seed = *g.seed;
  setting(g, "cost", "w_tau_per_nm", s.cost.weights.w_tau);
  setting(g, "cost", "w_s_per_n", s.cost.weights.w_s);
  setting(g, "cost", "w_alpha_per_rad", s.cost.weights.w_alpha);
  s.validate();
  return s;
}

std::optional<wg::MlpModel> model_from(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return wg::MlpModel::from_json(read_file(path));
}

std::vector<wg::LabeledExample> dataset_from(const std::string& path) {
  std::istringstream in(read_file(path));
  return wg::read_dataset_csv(in);
}

wg::DatasetSplit split(const Globals& g, const std::vector<wg::LabeledExample>& data) {
  return wg::split_by_group(data, 0.8, 0.1, wg::derive_seed(g.seed.value_or(0), 17));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trajectory-conditioned grasp selection: scoring, simulation and surrogate tools"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Base seed (overrides scenario and dataset seeds)");
  app.add_option("--out", g.out, "Output file (default: stdout)");
  app.add_option("--config", g.config, "JSON settings file")->check(CLI::ExistingFile);
  app.add_option("--threads", g.threads, "Worker threads (0 = auto); results do not depend on it");

  std::string scenario_path, method = "analytic", model_path;
  std::size_t trial = 0;
  auto* score = app.add_subcommand("score", "Rank the candidates of one trial by a method");
  score->add_option("--scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  score->add_option("--method", method, "analytic | geometry | surrogate");
  score->add_option("--model", model_path, "Surrogate model JSON");
  score->add_option("--trial", trial, "Trial index");
  bool candidates_json = false;
  score->add_flag("--candidates-json", candidates_json, "Emit the candidate set as JSON instead");

  long long grasp_index = -1;
  auto* simulate = app.add_subcommand("simulate", "Roll out one grasp and emit its time series");
  simulate->add_option("--scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--method", method, "Selection method when --grasp is not given");
  simulate->add_option("--model", model_path, "Surrogate model JSON");
  simulate->add_option("--trial", trial, "Trial index");
  simulate->add_option("--grasp", grasp_index, "Candidate index to simulate");

  std::vector<std::string> scenario_paths;
  std::string methods_csv = "analytic,geometry";
  std::size_t trials = 0;
  auto* sweep = app.add_subcommand("sweep", "Method comparison over scenarios, emits trial records CSV");
  sweep->add_option("--scenario", scenario_paths, "Scenario JSON (repeatable)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--methods", methods_csv, "Comma-separated methods");
  sweep->add_option("--trials", trials, "Trials per scenario (0 = from scenario)");
  sweep->add_option("--model", model_path, "Surrogate model JSON");

  wg::DatasetConfig dcfg;
  auto* gen = app.add_subcommand("gen-data", "Build the surrogate training CSV");
  gen->add_option("--scenario", scenario_paths, "Base scenario JSON (repeatable)")->required()->check(CLI::ExistingFile);
  gen->add_option("--variants", dcfg.scenarios, "Randomized scenario variants");
  gen->add_option("--candidates", dcfg.candidates_per_scenario, "Candidates per variant");

  std::string data_path, history_path;
  wg::TrainConfig tcfg;
  auto* train = app.add_subcommand("train", "Fit the surrogate; emits model JSON");
  train->add_option("--data", data_path, "Dataset CSV")->required()->check(CLI::ExistingFile);
  train->add_option("--epochs", tcfg.epochs, "Epochs");
  train->add_option("--lr", tcfg.learning_rate, "Step size");
  train->add_option("--batch", tcfg.batch_size, "Batch size");
  std::string optimizer = "adam";
  train->add_option("--optimizer", optimizer, "adam | momentum");
  train->add_option("--history", history_path, "Write the training history JSON here");

  auto* eval = app.add_subcommand("eval", "Surrogate ranking metrics on the held-out split");
  eval->add_option("--data", data_path, "Dataset CSV")->required()->check(CLI::ExistingFile);
  eval->add_option("--model", model_path, "Model JSON")->required()->check(CLI::ExistingFile);

  std::string results_path, fit_path;
  auto* phase = app.add_subcommand("phase", "Torque-slip scatter CSV and logistic threshold fit JSON");
  phase->add_option("--results", results_path, "Trial records CSV")->required()->check(CLI::ExistingFile);
  phase->add_option("--fit", fit_path, "Fit JSON path (default: <out>.fit.json, or stdout after the CSV)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*seed_opt) g.seed = seed_value;
    load_config(g);

    if (*score) {
      const wg::Scenario s = scenario(g, scenario_path);
      const auto model = model_from(model_path);
      const wg::TrialSetup t = wg::prepare_trial(s, trial);
      if (candidates_json) {
        emit(g.out, wg::candidates_to_json(t.candidates));
      } else {
        if (t.candidates.empty()) throw wg::NoCandidate(t.status);
        const auto scored = wg::score_candidates(s, t, wg::method_from_string(method), model ? &*model : nullptr);
        std::ostringstream os;
        wg::write_scored_csv(os, scored, t.candidates, s.contact.c_tool);
        emit(g.out, os.str());
      }
    } else if (*simulate) {
      const wg::Scenario s = scenario(g, scenario_path);
      const auto model = model_from(model_path);
      const wg::TrialSetup t = wg::prepare_trial(s, trial);
      if (t.candidates.empty()) throw wg::NoCandidate(t.status);
      std::size_t index = 0;
      if (grasp_index >= 0) {
        index = static_cast<std::size_t>(grasp_index);
        if (index >= t.candidates.size()) throw wg::InvalidInput("--grasp is out of range");
      } else {
        const auto scored = wg::score_candidates(s, t, wg::method_from_string(method), model ? &*model : nullptr);
        index = scored[wg::select_index(scored)].index;
      }
      wg::SimConfig cfg = s.sim;
      cfg.seed = wg::derive_seed(t.seed, 3);
      cfg.record_series = true;
      emit(g.out, wg::metrics_to_json(wg::rollout(s.tool, t.body, t.candidates[index], t.trajectory, s.contact, cfg)));
    } else if (*sweep) {
      std::vector<wg::Scenario> scenarios;
      for (const auto& p : scenario_paths) scenarios.push_back(scenario(g, p));
      std::vector<wg::Method> methods;
      std::stringstream ms(methods_csv);
      for (std::string m; std::getline(ms, m, ',');) methods.push_back(wg::method_from_string(m));
      const auto model = model_from(model_path);
      const auto records = wg::run_comparison(scenarios, methods, trials, model ? &*model : nullptr, g.threads);
      std::ostringstream os;
      wg::write_records_csv(os, records);
      emit(g.out, os.str());
    } else if (*gen) {
      std::vector<wg::Scenario> bases;
      for (const auto& p : scenario_paths) bases.push_back(scenario(g, p));
      setting(g, "dataset", "scenarios", dcfg.scenarios);
      setting(g, "dataset", "candidates_per_scenario", dcfg.candidates_per_scenario);
      if (g.seed) dcfg.seed = *g.seed;
      const auto data = wg::generate_dataset(bases, dcfg, g.threads);
      std::ostringstream os;
      wg::write_dataset_csv(os, data);
      emit(g.out, os.str());
    } else if (*train) {
      setting(g, "train", "epochs", tcfg.epochs);
      setting(g, "train", "learning_rate", tcfg.learning_rate);
      setting(g, "train", "momentum", tcfg.momentum);
      setting(g, "train", "batch_size", tcfg.batch_size);
      setting(g, "train", "hidden", tcfg.hidden);
      setting(g, "train", "clip_norm", tcfg.clip_norm);
      setting(g, "train", "optimizer", optimizer);
      tcfg.optimizer = wg::optimizer_from_string(optimizer);
      if (g.seed) tcfg.seed = *g.seed;
      const auto data = dataset_from(data_path);
      const auto parts = split(g, data);
      const auto result = wg::train(parts.train, parts.validation, tcfg);
      emit(g.out, result.model.to_json());
      if (!history_path.empty()) emit(history_path, wg::history_to_json(result.history));
    } else if (*eval) {
      const auto data = dataset_from(data_path);
      const auto parts = split(g, data);
      const auto model = wg::MlpModel::from_json(read_file(model_path));
      emit(g.out, wg::evaluation_to_json(wg::evaluate_surrogate(model, parts.test, wg::CostWeights{})));
    } else if (*phase) {
      std::istringstream in(read_file(results_path));
      const auto records = wg::read_records_csv(in);
      const auto report = wg::phase_diagram(records);
      const auto fit = wg::threshold_fit(records);
      std::ostringstream os;
      wg::write_phase_csv(os, report);
      const std::string fit_json = wg::phase_report_json(report, fit);
      if (!fit_path.empty()) {
        emit(g.out, os.str());
        emit(fit_path, fit_json);
      } else if (!g.out.empty() && g.out != "-") {
        emit(g.out, os.str());
        emit(g.out + ".fit.json", fit_json);
      } else {
        emit("", os.str() + "\n" + fit_json);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "wrenchgrasp: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
