#include "wrenchgrasp/io.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "wrenchgrasp/errors.hpp"

namespace wrenchgrasp {

using nlohmann::json;

std::string format_real(double x) {
  if (x == 0.0) x = 0.0;  // drop the sign of negative zero
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

double parse_real(const std::string& s, const std::string& column, std::size_t row) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("row " + std::to_string(row) + "." + column, "expected a number, got '" + s + "'");
  }
}

std::uint64_t parse_u64(const std::string& s, const std::string& column, std::size_t row) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("row " + std::to_string(row) + "." + column, "expected an unsigned integer, got '" + s + "'");
  }
}

const std::vector<std::string> kRecordColumns = {
    "schema_version", "scenario",   "method",   "trial",      "seed",          "grasp_index", "candidate_count",
    "candidate_hash", "score",      "c_tau_nm", "c_slip_n",   "c_align_rad",   "total",       "lever_m",
    "tau_max_nm",     "s_max_m",    "alpha_max_rad", "failed", "status"};

void write_header(std::ostream& out, const std::vector<std::string>& cols) {
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
}

void check_header(std::istream& in, const std::vector<std::string>& cols) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("header", "empty CSV");
  if (split_csv_line(line) != cols) throw ParseError("header", "unexpected CSV columns");
}

}  // namespace

void write_records_csv(std::ostream& out, std::span<const TrialRecord> records) {
  write_header(out, kRecordColumns);
  for (const auto& r : records) {
    out << kCsvSchemaVersion << ',' << quote(r.scenario) << ',' << to_string(r.method) << ',' << r.trial << ','
        << r.seed << ',' << r.grasp_index << ',' << r.candidate_count << ',' << r.candidate_hash << ','
        << format_real(r.score) << ',' << format_real(r.cost.c_tau) << ',' << format_real(r.cost.c_slip) << ','
        << format_real(r.cost.c_align) << ',' << format_real(r.cost.total) << ',' << format_real(r.lever_m) << ','
        << format_real(r.tau_max) << ',' << format_real(r.s_max) << ',' << format_real(r.alpha_max) << ','
        << (r.failed ? 1 : 0) << ',' << quote(r.status) << '\n';
  }
}

std::vector<TrialRecord> read_records_csv(std::istream& in) {
  check_header(in, kRecordColumns);
  std::vector<TrialRecord> out;
  std::string line;
  for (std::size_t row = 1; std::getline(in, line); ++row) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != kRecordColumns.size()) throw ParseError("row " + std::to_string(row), "wrong column count");
    if (parse_u64(f[0], "schema_version", row) != static_cast<std::uint64_t>(kCsvSchemaVersion)) {
      throw ParseError("row " + std::to_string(row) + ".schema_version", "unsupported version");
    }
    TrialRecord r;
    r.scenario = f[1];
    try {
      r.method = method_from_string(f[2]);
    } catch (const InvalidInput& e) {
      throw ParseError("row " + std::to_string(row) + ".method", e.what());
    }
    r.trial = parse_u64(f[3], "trial", row);
    r.seed = parse_u64(f[4], "seed", row);
    r.grasp_index = static_cast<long long>(parse_real(f[5], "grasp_index", row));
    r.candidate_count = parse_u64(f[6], "candidate_count", row);
    r.candidate_hash = parse_u64(f[7], "candidate_hash", row);
    r.score = parse_real(f[8], "score", row);
    r.cost.c_tau = parse_real(f[9], "c_tau_nm", row);
    r.cost.c_slip = parse_real(f[10], "c_slip_n", row);
    r.cost.c_align = parse_real(f[11], "c_align_rad", row);
    r.cost.total = parse_real(f[12], "total", row);
    r.lever_m = parse_real(f[13], "lever_m", row);
    r.tau_max = parse_real(f[14], "tau_max_nm", row);
    r.s_max = parse_real(f[15], "s_max_m", row);
    r.alpha_max = parse_real(f[16], "alpha_max_rad", row);
    r.failed = parse_u64(f[17], "failed", row) != 0;
    r.status = f[18];
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

std::vector<std::string> dataset_columns() {
  std::vector<std::string> cols{"schema_version", "group"};
  for (std::size_t i = 0; i < kFeatureCount; ++i) cols.push_back("f" + std::to_string(i));
  cols.insert(cols.end(), {"c_tau_nm", "c_slip_n", "c_align_rad"});
  return cols;
}

}  // namespace

void write_dataset_csv(std::ostream& out, std::span<const LabeledExample> data) {
  write_header(out, dataset_columns());
  for (const auto& e : data) {
    out << kCsvSchemaVersion << ',' << e.group;
    for (Eigen::Index i = 0; i < e.x.size(); ++i) out << ',' << format_real(e.x[i]);
    for (int k = 0; k < 3; ++k) out << ',' << format_real(e.y[k]);
    out << '\n';
  }
}

std::vector<LabeledExample> read_dataset_csv(std::istream& in) {
  const auto cols = dataset_columns();
  check_header(in, cols);
  std::vector<LabeledExample> out;
  std::string line;
  for (std::size_t row = 1; std::getline(in, line); ++row) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != cols.size()) throw ParseError("row " + std::to_string(row), "wrong column count");
    LabeledExample e;
    e.group = parse_u64(f[1], "group", row);
    e.x.resize(kFeatureCount);
    for (std::size_t i = 0; i < kFeatureCount; ++i) e.x[static_cast<Eigen::Index>(i)] = parse_real(f[2 + i], cols[2 + i], row);
    for (int k = 0; k < 3; ++k) e.y[k] = parse_real(f[2 + kFeatureCount + k], cols[2 + kFeatureCount + k], row);
    out.push_back(std::move(e));
  }
  return out;
}

void write_scored_csv(std::ostream& out, std::span<const ScoredCandidate> scored,
                      std::span<const GraspCandidate> candidates, const Vec3& c_tool) {
  out << "schema_version,rank,grasp_index,score,c_tau_nm,c_slip_n,c_align_rad,total,lever_m,jaw_width_m,"
         "origin_x_m,origin_y_m,origin_z_m,closure_x,closure_y,closure_z\n";
  std::vector<ScoredCandidate> sorted(scored.begin(), scored.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score < b.score;
    if (a.breakdown.c_tau != b.breakdown.c_tau) return a.breakdown.c_tau < b.breakdown.c_tau;
    return a.index < b.index;
  });
  for (std::size_t rank = 0; rank < sorted.size(); ++rank) {
    const auto& s = sorted[rank];
    const auto& g = candidates[s.index];
    out << kCsvSchemaVersion << ',' << rank << ',' << s.index << ',' << format_real(s.score) << ','
        << format_real(s.breakdown.c_tau) << ',' << format_real(s.breakdown.c_slip) << ','
        << format_real(s.breakdown.c_align) << ',' << format_real(s.breakdown.total) << ','
        << format_real((c_tool - g.origin()).norm()) << ',' << format_real(g.jaw_width);
    for (int k = 0; k < 3; ++k) out << ',' << format_real(g.origin()[k]);
    for (int k = 0; k < 3; ++k) out << ',' << format_real(g.closure_axis[k]);
    out << '\n';
  }
}

void write_phase_csv(std::ostream& out, const PhaseReport& report) {
  out << "schema_version,scenario,method,tau_max_nm,s_max_m,failed\n";
  for (const auto& r : report.rows) {
    out << kCsvSchemaVersion << ',' << quote(r.scenario) << ',' << r.method << ',' << format_real(r.tau_max) << ','
        << format_real(r.s_max) << ',' << (r.failed ? 1 : 0) << '\n';
  }
}

namespace {

// Reals go through format_real so JSON and CSV agree digit for digit.
json real(double x) {
  if (!std::isfinite(x)) return nullptr;
  return json::parse(format_real(x));
}

json opt(const std::optional<double>& x) { return x ? real(*x) : json(nullptr); }

json vec(const Vec3& v) { return json::array({real(v.x()), real(v.y()), real(v.z())}); }

json fit_json(const ThresholdFit& f) {
  return {{"a_per_nm", real(f.a)},
          {"b_nm", real(f.b)},
          {"se_a", real(f.se_a)},
          {"se_b", real(f.se_b)},
          {"log_likelihood", real(f.log_likelihood)},
          {"iterations", f.iterations},
          {"converged", f.converged},
          {"separated", f.separated},
          {"b_low_nm", f.separated ? real(f.b_low) : json(nullptr)},
          {"b_high_nm", f.separated ? real(f.b_high) : json(nullptr)},
          {"slope_positive_95", f.slope_positive_95()},
          {"tolerance", 1e-8}};
}

json reals(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(real(x));
  return a;
}

}  // namespace

std::string candidates_to_json(std::span<const GraspCandidate> candidates) {
  json arr = json::array();
  for (const auto& g : candidates) {
    json rot = json::array();
    for (int r = 0; r < 3; ++r) rot.push_back(vec(g.pose.rotation().row(r).transpose()));
    arr.push_back({{"rotation", rot},
                   {"translation_m", vec(g.pose.translation())},
                   {"closure_axis", vec(g.closure_axis)},
                   {"finger_normal", vec(g.finger_normal)},
                   {"jaw_width_m", real(g.jaw_width)},
                   {"clamp_force_n", real(g.clamp_force)},
                   {"contacts_m", {vec(g.contacts[0]), vec(g.contacts[1])}},
                   {"contact_normals", {vec(g.contact_normals[0]), vec(g.contact_normals[1])}}});
  }
  return json({{"schema_version", 1}, {"candidates", arr}}).dump(2) + "\n";
}

std::string phase_report_json(const PhaseReport& report, const ThresholdFit& fit) {
  json by = json::object();
  for (const auto& [m, r] : report.spearman_by_method) by[m] = opt(r);
  return json({{"schema_version", 1},
               {"records", report.rows.size()},
               {"spearman_by_method", by},
               {"spearman_pooled", opt(report.spearman_pooled)},
               {"threshold_fit", fit_json(fit)}})
             .dump(2) +
         "\n";
}

std::string fit_to_json(const ThresholdFit& fit) {
  json j = fit_json(fit);
  j["schema_version"] = 1;
  return j.dump(2) + "\n";
}

std::string history_to_json(const TrainHistory& h) {
  return json({{"schema_version", 1},
               {"best_epoch", h.best_epoch},
               {"train_loss", reals(h.train_loss)},
               {"validation_loss", reals(h.validation_loss)},
               {"best_validation_loss", reals(h.best_validation_loss)}})
             .dump(2) +
         "\n";
}

std::string evaluation_to_json(const SurrogateEvaluation& ev) {
  return json({{"schema_version", 1},
               {"spearman", opt(ev.spearman)},
               {"groups", ev.groups},
               {"regret_bound", real(ev.regret_bound)},
               {"regret_pass_fraction", real(ev.regret_pass_fraction)},
               {"regrets", reals(ev.regrets)}})
             .dump(2) +
         "\n";
}

std::string metrics_to_json(const SimMetrics& m) {
  json series = json::array();
  for (const auto& s : m.time_series) {
    series.push_back({{"t_s", real(s.t)},
                      {"wrist_force_n", vec(s.wrist_force)},
                      {"wrist_torque_nm", vec(s.wrist_torque)},
                      {"slip_m", real(s.slip)},
                      {"rotation_rad", real(s.rotation)}});
  }
  return json({{"schema_version", 1},
               {"tau_max_nm", real(m.tau_max)},
               {"s_max_m", real(m.s_max)},
               {"alpha_max_rad", real(m.alpha_max)},
               {"failed", m.failed},
               {"events", m.events},
               {"restitution_residuals", reals(m.restitution_residuals)},
               {"time_series", series}})
             .dump(2) +
         "\n";
}

}  // namespace wrenchgrasp
