#include "wrenchgrasp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>

#include "wrenchgrasp/errors.hpp"
#include "wrenchgrasp/random.hpp"

namespace wrenchgrasp {

std::string to_string(Method m) {
  switch (m) {
    case Method::analytic: return "analytic";
    case Method::surrogate: return "surrogate";
    case Method::geometry: return "geometry";
    case Method::sampled: return "sampled";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  if (name == "analytic") return Method::analytic;
  if (name == "surrogate") return Method::surrogate;
  if (name == "geometry") return Method::geometry;
  if (name == "sampled") return Method::sampled;
  throw InvalidInput("unknown method: " + name);
}

namespace {

// Runs fn(i) for i in [0, n) on a small pool. Each index is processed exactly
// once; callers write results into pre-sized slots so order is fixed.
template <typename F>
void parallel_for(std::size_t n, unsigned threads, F&& fn) {
  if (threads == 0) threads = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = next++; i < n; i = next++) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
        next = n;
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

CostOptions cost_options(const Scenario& s) {
  CostOptions o;
  o.dt = s.cost.dt_s;
  return o;
}

}  // namespace

std::uint64_t trial_seed(const Scenario& s, std::size_t trial) { return derive_seed(s.seed, trial); }

TrialSetup prepare_trial(const Scenario& s, std::size_t trial, std::size_t count) {
  TrialSetup t;
  t.seed = trial_seed(s, trial);
  t.body = make_body(s);
  t.trajectory = synth_trajectory(s.task, s.motion, s.contact);
  t.cloud = sample_surface(s.tool, s.cloud_points, derive_seed(t.seed, 1));
  t.grasp_cloud = s.grasp_region ? crop(t.cloud, *s.grasp_region) : t.cloud;
  if (t.grasp_cloud.empty()) {
    t.status = "grasp region contains no surface points";
    return t;
  }
  SamplerConfig sc = s.sampler;
  if (count > 0) sc.count = count;
  SampleResult r = sample_antipodal(t.grasp_cloud, sc, derive_seed(t.seed, 2));
  t.candidates = std::move(r.candidates);
  if (!r.ok) t.status = r.status;
  t.candidate_hash = candidate_set_hash(t.candidates);
  return t;
}

std::vector<ScoredCandidate> score_candidates(const Scenario& s, const TrialSetup& t, Method method,
                                              const MlpModel* model) {
  if (method == Method::surrogate && model == nullptr) throw InvalidParameter("surrogate scoring needs a model");
  const CostOptions opts = cost_options(s);
  std::vector<ScoredCandidate> out;
  out.reserve(t.candidates.size());
  for (std::size_t i = 0; i < t.candidates.size(); ++i) {
    const auto& g = t.candidates[i];
    ScoredCandidate sc;
    sc.index = i;
    if (method == Method::surrogate) {
      const Eigen::Vector3d c = model->forward(featurize(g, t.cloud, t.trajectory, s.contact, t.body));
      sc.breakdown = weighted({c[0], c[1], c[2], 0.0}, s.cost.weights);
      sc.score = sc.breakdown.total;
    } else {
      sc.breakdown = analytic_cost(g, t.trajectory, s.contact, t.body, s.cost.weights, opts);
      sc.score = method == Method::geometry ? 1.0 - geometry_score(g, t.cloud) : sc.breakdown.total;
    }
    out.push_back(sc);
  }
  return out;
}

std::size_t select_index(std::span<const ScoredCandidate> scored) {
  if (scored.empty()) throw NoCandidate("no grasp candidates to select from");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scored.size(); ++i) {
    const auto& a = scored[i];
    const auto& b = scored[best];
    if (a.score < b.score || (a.score == b.score && a.breakdown.c_tau < b.breakdown.c_tau)) best = i;
  }
  return best;
}

bool record_less(const TrialRecord& a, const TrialRecord& b) {
  if (a.scenario != b.scenario) return a.scenario < b.scenario;
  if (a.method != b.method) return to_string(a.method) < to_string(b.method);
  if (a.trial != b.trial) return a.trial < b.trial;
  return a.grasp_index < b.grasp_index;
}

namespace {

TrialRecord simulate_choice(const Scenario& s, const TrialSetup& t, Method method, std::size_t trial,
                            std::size_t index, double score) {
  TrialRecord r;
  r.scenario = s.name;
  r.method = method;
  r.trial = trial;
  r.seed = t.seed;
  r.candidate_count = t.candidates.size();
  r.candidate_hash = t.candidate_hash;
  r.grasp_index = static_cast<long long>(index);
  r.score = score;
  const auto& g = t.candidates[index];
  r.lever_m = (s.contact.c_tool - g.origin()).norm();
  r.cost = analytic_cost(g, t.trajectory, s.contact, t.body, s.cost.weights, cost_options(s));
  SimConfig cfg = s.sim;
  cfg.seed = derive_seed(t.seed, 3);
  try {
    const SimMetrics m = rollout(s.tool, t.body, g, t.trajectory, s.contact, cfg);
    r.tau_max = m.tau_max;
    r.s_max = m.s_max;
    r.alpha_max = m.alpha_max;
    r.failed = m.failed;
  } catch (const Error& e) {
    r.failed = true;
    r.status = std::string("rollout error: ") + e.what();
  }
  return r;
}

TrialRecord empty_record(const Scenario& s, const TrialSetup& t, Method method, std::size_t trial) {
  TrialRecord r;
  r.scenario = s.name;
  r.method = method;
  r.trial = trial;
  r.seed = t.seed;
  r.candidate_hash = t.candidate_hash;
  r.failed = true;
  r.status = "no candidate: " + (t.status.empty() ? std::string("empty candidate set") : t.status);
  return r;
}

}  // namespace

std::vector<TrialRecord> run_comparison(const std::vector<Scenario>& scenarios, const std::vector<Method>& methods,
                                        std::size_t trials, const MlpModel* model, unsigned threads) {
  struct Job {
    std::size_t scenario;
    std::size_t trial;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const std::size_t n = trials > 0 ? trials : scenarios[i].trials;
    for (std::size_t k = 0; k < n; ++k) jobs.push_back({i, k});
  }
  std::vector<std::vector<TrialRecord>> slots(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t j) {
    const Scenario& s = scenarios[jobs[j].scenario];
    const std::size_t trial = jobs[j].trial;
    const TrialSetup t = prepare_trial(s, trial);
    for (Method m : methods) {
      if (t.candidates.empty()) {
        slots[j].push_back(empty_record(s, t, m, trial));
        continue;
      }
      const auto scored = score_candidates(s, t, m, model);
      const std::size_t best = select_index(scored);
      slots[j].push_back(simulate_choice(s, t, m, trial, scored[best].index, scored[best].score));
    }
  });
  std::vector<TrialRecord> out;
  for (auto& v : slots) out.insert(out.end(), v.begin(), v.end());
  std::stable_sort(out.begin(), out.end(), record_less);
  return out;
}

std::vector<TrialRecord> rollout_sampled(const Scenario& s, std::size_t count, std::size_t trial, unsigned threads) {
  const TrialSetup t = prepare_trial(s, trial, count);
  if (t.candidates.empty()) return {empty_record(s, t, Method::sampled, trial)};
  std::vector<TrialRecord> out(t.candidates.size());
  parallel_for(t.candidates.size(), threads, [&](std::size_t i) {
    out[i] = simulate_choice(s, t, Method::sampled, trial, i, 0.0);
  });
  return out;
}

PhaseReport phase_diagram(std::span<const TrialRecord> records) {
  PhaseReport rep;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_method;
  std::vector<double> all_tau, all_s;
  for (const auto& r : records) {
    if (!r.ok()) continue;
    const std::string m = to_string(r.method);
    rep.rows.push_back({r.scenario, m, r.tau_max, r.s_max, r.failed});
    by_method[m].first.push_back(r.tau_max);
    by_method[m].second.push_back(r.s_max);
    all_tau.push_back(r.tau_max);
    all_s.push_back(r.s_max);
  }
  if (rep.rows.size() < 30) throw InvalidInput("phase diagram needs at least 30 usable records");
  for (const auto& [m, xy] : by_method) rep.spearman_by_method.emplace_back(m, spearman(xy.first, xy.second));
  rep.spearman_pooled = spearman(all_tau, all_s);
  return rep;
}

ThresholdFit threshold_fit(std::span<const TrialRecord> records) {
  std::vector<double> tau;
  std::vector<bool> failed;
  for (const auto& r : records) {
    if (!r.ok()) continue;
    tau.push_back(r.tau_max);
    failed.push_back(r.failed);
  }
  return threshold_fit(tau, failed);
}

double fraction_below(std::span<const TrialRecord> records, Method method, double b) {
  std::size_t n = 0, below = 0;
  for (const auto& r : records) {
    if (!r.ok() || r.method != method) continue;
    ++n;
    if (r.tau_max < b) ++below;
  }
  return n == 0 ? 0.0 : static_cast<double>(below) / static_cast<double>(n);
}

Scenario randomize_scenario(const Scenario& base, std::uint64_t seed) {
  Rng rng(seed);
  Scenario s = base;
  s.seed = derive_seed(seed, 11);
  s.motion.speed_mps *= rng.uniform() < 0.1 ? 0.05 : rng.uniform(0.4, 1.6);
  s.body.restitution = rng.uniform(0.0, 0.5);
  s.body.mass_scale *= rng.uniform(0.7, 1.4);
  for (auto& p : s.tool.primitives) p.density *= rng.uniform(0.7, 1.4);
  // Slow sweeps need longer to cover their contacts; stretch the horizon at the same sample spacing.
  auto& m = s.motion;
  const double contacts = s.task == TaskKind::sweep ? static_cast<double>(m.sweep_count) - 1.0 : 0.0;
  const double needed = m.event_time_s + contacts * m.sweep_spacing_m / m.speed_mps + m.post_cruise_s + m.decel_s;
  if (needed > m.horizon_s) {
    const double dt = m.horizon_s / static_cast<double>(m.samples);
    m.horizon_s = needed + 0.05;
    m.samples = static_cast<std::size_t>(std::ceil(m.horizon_s / dt));
    m.horizon_s = dt * static_cast<double>(m.samples);
  }
  return s;
}

std::vector<LabeledExample> generate_dataset(const std::vector<Scenario>& bases, const DatasetConfig& cfg,
                                             unsigned threads) {
  if (bases.empty()) throw InvalidInput("dataset generation needs at least one base scenario");
  std::vector<std::vector<LabeledExample>> slots(cfg.scenarios);
  parallel_for(cfg.scenarios, threads, [&](std::size_t v) {
    const Scenario s = randomize_scenario(bases[v % bases.size()], derive_seed(cfg.seed, v));
    TrialSetup t;
    try {
      t = prepare_trial(s, 0, cfg.candidates_per_scenario);
    } catch (const SynthesisError&) {
      return;
    }
    const CostOptions opts = cost_options(s);
    for (const auto& g : t.candidates) {
      const CostBreakdown c = analytic_cost(g, t.trajectory, s.contact, t.body, s.cost.weights, opts);
      LabeledExample e;
      e.x = featurize(g, t.cloud, t.trajectory, s.contact, t.body);
      e.y = Eigen::Vector3d(c.c_tau, c.c_slip, c.c_align);
      e.group = v;
      slots[v].push_back(std::move(e));
    }
  });
  std::vector<LabeledExample> out;
  for (auto& v : slots) out.insert(out.end(), v.begin(), v.end());
  return out;
}

DatasetSplit split_by_group(std::span<const LabeledExample> data, double train_fraction, double validation_fraction,
                            std::uint64_t seed) {
  if (train_fraction < 0.0 || validation_fraction < 0.0 || train_fraction + validation_fraction > 1.0) {
    throw InvalidParameter("split fractions must be non-negative and sum to at most 1");
  }
  std::vector<std::size_t> groups;
  for (const auto& e : data) groups.push_back(e.group);
  std::sort(groups.begin(), groups.end());
  groups.erase(std::unique(groups.begin(), groups.end()), groups.end());
  Rng rng(seed);
  for (std::size_t i = groups.size(); i > 1; --i) std::swap(groups[i - 1], groups[rng.index(i)]);

  const auto n = static_cast<double>(groups.size());
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * n));
  const auto n_val = static_cast<std::size_t>(std::llround(validation_fraction * n));
  std::map<std::size_t, int> where;
  for (std::size_t i = 0; i < groups.size(); ++i) where[groups[i]] = i < n_train ? 0 : (i < n_train + n_val ? 1 : 2);

  DatasetSplit split;
  for (const auto& e : data) {
    const int w = where[e.group];
    (w == 0 ? split.train : w == 1 ? split.validation : split.test).push_back(e);
  }
  return split;
}

SurrogateEvaluation evaluate_surrogate(const MlpModel& model, std::span<const LabeledExample> data,
                                       const CostWeights& weights, double regret_bound) {
  SurrogateEvaluation ev;
  ev.regret_bound = regret_bound;
  std::vector<double> pred, truth;
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < data.size(); ++i) {
    pred.push_back(predict_cost(model, data[i].x, weights));
    truth.push_back(total_cost(data[i].y[0], data[i].y[1], data[i].y[2], weights));
    groups[data[i].group].push_back(i);
  }
  ev.spearman = spearman(pred, truth);
  std::size_t pass = 0;
  for (const auto& [g, idx] : groups) {
    std::size_t best_pred = idx.front();
    double best_true = truth[idx.front()];
    for (std::size_t i : idx) {
      if (pred[i] < pred[best_pred]) best_pred = i;
      best_true = std::min(best_true, truth[i]);
    }
    const double regret = (truth[best_pred] - best_true) / std::max(best_true, 1e-9);
    ev.regrets.push_back(regret);
    if (regret <= regret_bound) ++pass;
  }
  ev.groups = groups.size();
  ev.regret_pass_fraction = ev.groups == 0 ? 0.0 : static_cast<double>(pass) / static_cast<double>(ev.groups);
  return ev;
}

}  // namespace wrenchgrasp
