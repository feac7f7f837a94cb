#include "wrenchgrasp/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "wrenchgrasp/errors.hpp"
#include "wrenchgrasp/wrench.hpp"
#include "wrenchgrasp/random.hpp"

namespace wrenchgrasp {

namespace {

// N s; stands in for J = 0 so the log feature stays finite.
constexpr double kImpulseFloor = 1e-6;

}  // namespace

FeatureVector featurize(const GraspCandidate& g, const PointCloud& cloud, const Trajectory& trajectory,
                        const ContactParams& contact, const RigidBodyModel& body, double patch_radius) {
  if (cloud.empty()) throw InvalidInput("point cloud is empty");
  if (trajectory.samples.empty()) throw InvalidInput("trajectory has no samples");
  const auto events = contact_events(trajectory, contact);

  Pose pose;
  Vec3 point;
  Vec3 n;
  double speed = 0.0;
  double spin = 0.0;
  double impulse = 0.0;
  if (!events.empty()) {
    const auto fastest = std::max_element(events.begin(), events.end(), [](const auto& a, const auto& b) {
      return a.approach_speed < b.approach_speed;
    });
    pose = fastest->pose;
    point = fastest->point;
    n = fastest->normal;
    speed = fastest->approach_speed;
    spin = fastest->omega.norm();
    const RigidBodyModel wb = body.expressed_in(pose);
    ContactState cs;
    cs.r = point - wb.com;
    cs.n = n;
    cs.v = fastest->v + fastest->omega.cross(wb.com - pose.translation());
    cs.omega = fastest->omega;
    cs.object_inverse_mass = fastest->object_inverse_mass;
    impulse = normal_impulse(wb, cs).impulse;
  } else {
    const std::size_t k = std::min(trajectory.nominal_index, trajectory.samples.size() - 1);
    pose = trajectory.samples[k].pose;
    point = pose.apply(contact.c_tool);
    n = trajectory.targets.empty() ? contact.n : trajectory.targets.front().normal;
  }

  const Vec3 rg = point - pose.apply(g.origin());
  const Vec3 closure = pose.rotate(g.closure_axis).normalized();
  const Vec3 nf = pose.rotate(g.finger_normal).normalized();
  const Vec3 m = rg.cross(n);
  const double m_norm = m.norm();

  FeatureVector x(kFeatureCount);
  x[0] = rg.norm();
  x[1] = m_norm;
  x[2] = std::acos(std::abs(std::clamp(nf.dot(n), -1.0, 1.0)));
  x[3] = m_norm > 1e-12 ? std::abs(std::clamp(closure.dot(m / m_norm), -1.0, 1.0)) : 0.0;
  x[4] = speed;
  x[5] = spin;
  x[kImpulseFeature] = std::log(std::max(impulse, kImpulseFloor));
  x[7] = 0.5 * (curvature_proxy(cloud, g.contacts[0], g.contact_normals[0], patch_radius) +
                curvature_proxy(cloud, g.contacts[1], g.contact_normals[1], patch_radius));
  x[8] = g.jaw_width;
  x[9] = static_cast<double>(events.size());
  return x;
}

namespace {

const double kSoftplusInverseOne = std::log(std::exp(1.0) - 1.0);

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }
double sigmoid(double z) { return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

// Row-per-example activations for one batch.
struct Pass {
  std::vector<Eigen::MatrixXd> a;  // a[0] standardized input, a[l+1] layer outputs (post-activation)
  Eigen::MatrixXd z_out;           // pre-softplus output
  Eigen::MatrixXd pred;
};

Eigen::MatrixXd standardized(const MlpModel& m, std::span<const LabeledExample> data) {
  const auto d = static_cast<Eigen::Index>(m.layer_sizes.front());
  Eigen::MatrixXd x(static_cast<Eigen::Index>(data.size()), d);
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].x.size() != d) throw InvalidInput("feature dimension does not match the input layer");
    x.row(static_cast<Eigen::Index>(i)) =
        ((data[i].x - m.input_mean).array() / m.input_scale.array()).transpose();
  }
  return x;
}

// Per-example head multipliers exp(c_k x[scale_feature]) from the raw features.
Eigen::MatrixXd multipliers(const MlpModel& m, std::span<const LabeledExample> data) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(data.size()), 3);
  if (m.scale_feature < 0) return out;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double v = data[i].x[m.scale_feature];
    for (Eigen::Index k = 0; k < 3; ++k) out(static_cast<Eigen::Index>(i), k) = std::exp(m.scale_exponent[k] * v);
  }
  return out;
}

Pass run(const MlpModel& m, Eigen::MatrixXd x, const Eigen::MatrixXd& mult) {
  Pass p;
  p.a.push_back(std::move(x));
  const std::size_t layers = m.weights.size();
  for (std::size_t l = 0; l + 1 < layers; ++l) {
    Eigen::MatrixXd z = p.a.back() * m.weights[l].transpose();
    z.rowwise() += m.biases[l].transpose();
    p.a.push_back(z.array().tanh().matrix());
  }
  p.z_out = p.a.back() * m.weights.back().transpose();
  p.z_out.rowwise() += m.biases.back().transpose();
  p.pred = p.z_out.unaryExpr([](double z) { return softplus(z); });
  for (Eigen::Index k = 0; k < p.pred.cols(); ++k) p.pred.col(k) *= m.output_scale[k];
  p.pred.array() *= mult.array();
  return p;
}

Eigen::MatrixXd targets(std::span<const LabeledExample> data) {
  Eigen::MatrixXd y(static_cast<Eigen::Index>(data.size()), 3);
  for (std::size_t i = 0; i < data.size(); ++i) y.row(static_cast<Eigen::Index>(i)) = data[i].y.transpose();
  return y;
}

}  // namespace

MlpModel MlpModel::initialize(std::vector<int> sizes, std::uint64_t seed) {
  if (sizes.size() < 2 || sizes.back() != 3) throw InvalidParameter("network needs an input layer and 3 outputs");
  for (int s : sizes) {
    if (s <= 0) throw InvalidParameter("layer sizes must be positive");
  }
  MlpModel m;
  m.layer_sizes = std::move(sizes);
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < m.layer_sizes.size(); ++l) {
    const int in = m.layer_sizes[l];
    const int out = m.layer_sizes[l + 1];
    const double bound = std::sqrt(6.0 / (in + out));
    Eigen::MatrixXd w(out, in);
    for (int i = 0; i < out; ++i)
      for (int j = 0; j < in; ++j) w(i, j) = rng.uniform(-bound, bound);
    m.weights.push_back(std::move(w));
    m.biases.push_back(Eigen::VectorXd::Zero(out));
  }
  m.biases.back().setConstant(kSoftplusInverseOne);
  m.input_mean = Eigen::VectorXd::Zero(m.layer_sizes.front());
  m.input_scale = Eigen::VectorXd::Ones(m.layer_sizes.front());
  m.output_scale = Eigen::VectorXd::Ones(3);
  return m;
}

std::size_t MlpModel::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
  return n;
}

Eigen::VectorXd MlpModel::parameters() const {
  Eigen::VectorXd flat(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    for (Eigen::Index i = 0; i < weights[l].rows(); ++i)
      for (Eigen::Index j = 0; j < weights[l].cols(); ++j) flat[k++] = weights[l](i, j);
    for (Eigen::Index i = 0; i < biases[l].size(); ++i) flat[k++] = biases[l][i];
  }
  return flat;
}

void MlpModel::set_parameters(const Eigen::VectorXd& flat) {
  if (static_cast<std::size_t>(flat.size()) != parameter_count()) throw InvalidInput("parameter vector size mismatch");
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    for (Eigen::Index i = 0; i < weights[l].rows(); ++i)
      for (Eigen::Index j = 0; j < weights[l].cols(); ++j) weights[l](i, j) = flat[k++];
    for (Eigen::Index i = 0; i < biases[l].size(); ++i) biases[l][i] = flat[k++];
  }
}

Eigen::Vector3d MlpModel::forward(const FeatureVector& x) const {
  if (x.size() != layer_sizes.front()) throw InvalidInput("feature dimension does not match the input layer");
  LabeledExample e;
  e.x = x;
  const std::span<const LabeledExample> one(&e, 1);
  const Pass p = run(*this, standardized(*this, one), multipliers(*this, one));
  return p.pred.row(0).transpose();
}

void MlpModel::validate() const {
  if (layer_sizes.size() < 2 || layer_sizes.back() != 3) throw InvalidModel("network needs at least two layers and 3 outputs");
  if (weights.size() != layer_sizes.size() - 1 || biases.size() != weights.size()) {
    throw InvalidModel("layer count does not match layer_sizes");
  }
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows() != layer_sizes[l + 1] || weights[l].cols() != layer_sizes[l] ||
        biases[l].size() != layer_sizes[l + 1]) {
      throw InvalidModel("layer " + std::to_string(l) + " has the wrong shape");
    }
    if (!weights[l].allFinite() || !biases[l].allFinite()) throw InvalidModel("non-finite parameters");
  }
  if (input_mean.size() != layer_sizes.front() || input_scale.size() != layer_sizes.front() ||
      output_scale.size() != 3) {
    throw InvalidModel("standardization vectors have the wrong size");
  }
  if ((input_scale.array() <= 0.0).any() || (output_scale.array() <= 0.0).any()) {
    throw InvalidModel("scales must be positive");
  }
  if (scale_feature >= layer_sizes.front() || scale_feature < -1 || !scale_exponent.allFinite()) {
    throw InvalidModel("scale feature out of range");
  }
}

double loss(const MlpModel& model, std::span<const LabeledExample> data) {
  if (data.empty()) return 0.0;
  const Pass p = run(model, standardized(model, data), multipliers(model, data));
  return (p.pred - targets(data)).squaredNorm() / static_cast<double>(data.size());
}

Eigen::VectorXd loss_gradient(const MlpModel& model, std::span<const LabeledExample> data) {
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.parameter_count()));
  if (data.empty()) return grad;
  const Eigen::MatrixXd mult = multipliers(model, data);
  const Pass p = run(model, standardized(model, data), mult);
  const double n = static_cast<double>(data.size());

  Eigen::MatrixXd delta = 2.0 / n * (p.pred - targets(data));
  for (Eigen::Index k = 0; k < delta.cols(); ++k) delta.col(k) *= model.output_scale[k];
  delta.array() *= mult.array();
  delta.array() *= p.z_out.unaryExpr([](double z) { return sigmoid(z); }).array();

  const std::size_t layers = model.weights.size();
  std::vector<Eigen::MatrixXd> gw(layers);
  std::vector<Eigen::VectorXd> gb(layers);
  for (std::size_t l = layers; l-- > 0;) {
    gw[l] = delta.transpose() * p.a[l];
    gb[l] = delta.colwise().sum().transpose();
    if (l == 0) break;
    delta = (delta * model.weights[l]).array() * (1.0 - p.a[l].array().square());
  }

  Eigen::Index k = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    for (Eigen::Index i = 0; i < gw[l].rows(); ++i)
      for (Eigen::Index j = 0; j < gw[l].cols(); ++j) grad[k++] = gw[l](i, j);
    for (Eigen::Index i = 0; i < gb[l].size(); ++i) grad[k++] = gb[l][i];
  }
  return grad;
}

double gradient_check(const MlpModel& model, std::span<const LabeledExample> data, double h) {
  const Eigen::VectorXd g = loss_gradient(model, data);
  const Eigen::VectorXd theta = model.parameters();
  Eigen::VectorXd fd(theta.size());
  MlpModel probe = model;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    Eigen::VectorXd t = theta;
    t[i] = theta[i] + h;
    probe.set_parameters(t);
    const double up = loss(probe, data);
    t[i] = theta[i] - h;
    probe.set_parameters(t);
    const double down = loss(probe, data);
    fd[i] = (up - down) / (2.0 * h);
  }
  const double denom = std::max({g.norm(), fd.norm(), 1e-300});
  return (g - fd).norm() / denom;
}

std::string to_string(Optimizer o) { return o == Optimizer::adam ? "adam" : "momentum"; }

Optimizer optimizer_from_string(const std::string& name) {
  if (name == "adam") return Optimizer::adam;
  if (name == "momentum") return Optimizer::momentum;
  throw InvalidParameter("unknown optimizer '" + name + "'");
}

TrainResult train(std::span<const LabeledExample> train_set, std::span<const LabeledExample> validation_set,
                  const TrainConfig& cfg) {
  if (train_set.size() + validation_set.size() < 100) throw InvalidInput("training needs at least 100 examples");
  if (train_set.empty() || validation_set.empty()) throw InvalidInput("train and validation sets must be non-empty");
  if (cfg.batch_size == 0 || !(cfg.learning_rate > 0.0) || cfg.momentum < 0.0 || cfg.momentum >= 1.0 ||
      cfg.beta2 < 0.0 || cfg.beta2 >= 1.0 || cfg.clip_norm < 0.0) {
    throw InvalidParameter("invalid optimizer settings");
  }

  const auto d = train_set.front().x.size();
  std::vector<int> sizes{static_cast<int>(d)};
  sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
  sizes.push_back(3);
  MlpModel model = MlpModel::initialize(sizes, cfg.seed);

  // Standardization statistics from the training split only.
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  Eigen::Vector3d ymean = Eigen::Vector3d::Zero();
  for (const auto& e : train_set) {
    if (e.x.size() != d) throw InvalidInput("inconsistent feature dimension");
    if (!e.x.allFinite() || !e.y.allFinite() || (e.y.array() < 0.0).any()) {
      throw InvalidInput("examples need finite features and non-negative targets");
    }
    mean += e.x;
    ymean += e.y;
  }
  const double n = static_cast<double>(train_set.size());
  mean /= n;
  ymean /= n;
  Eigen::VectorXd var = Eigen::VectorXd::Zero(d);
  for (const auto& e : train_set) var += (e.x - mean).array().square().matrix();
  var /= n;
  model.input_mean = mean;
  model.input_scale = var.cwiseSqrt().unaryExpr([](double s) { return s > 1e-12 ? s : 1.0; });
  if (cfg.impulse_scaled_heads) {
    model.scale_feature = static_cast<int>(kImpulseFeature);
    model.scale_exponent = Eigen::Vector3d(1.0, 1.0, 0.0);
    ymean.setZero();
    const Eigen::MatrixXd mult = multipliers(model, train_set);
    for (std::size_t i = 0; i < train_set.size(); ++i) {
      ymean += (train_set[i].y.array() / mult.row(static_cast<Eigen::Index>(i)).transpose().array()).matrix();
    }
    ymean /= n;
  }
  model.output_scale = ymean.unaryExpr([](double s) { return s > 1e-6 ? s : 1e-6; });

  TrainResult result;
  auto& h = result.history;
  Eigen::VectorXd theta = model.parameters();
  Eigen::VectorXd velocity = Eigen::VectorXd::Zero(theta.size());
  Eigen::VectorXd second = Eigen::VectorXd::Zero(theta.size());
  std::size_t step = 0;
  Eigen::VectorXd best = theta;
  double best_val = loss(model, validation_set);
  if (!std::isfinite(best_val)) throw TrainingFailed("initial validation loss is not finite", {});

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<LabeledExample> batch;
  Rng rng(derive_seed(cfg.seed, 1));

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(train_set[order[i]]);
      Eigen::VectorXd g = loss_gradient(model, batch);
      const double gn = g.norm();
      if (cfg.clip_norm > 0.0 && gn > cfg.clip_norm) g *= cfg.clip_norm / gn;
      if (cfg.optimizer == Optimizer::momentum) {
        velocity = cfg.momentum * velocity - cfg.learning_rate * g;
        theta += velocity;
      } else {
        ++step;
        velocity = cfg.momentum * velocity + (1.0 - cfg.momentum) * g;
        second = cfg.beta2 * second + (1.0 - cfg.beta2) * g.cwiseAbs2();
        const double c1 = 1.0 - std::pow(cfg.momentum, static_cast<double>(step));
        const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
        theta.array() -= cfg.learning_rate * (velocity.array() / c1) / ((second.array() / c2).sqrt() + 1e-8);
      }
      model.set_parameters(theta);
    }
    const double tl = loss(model, train_set);
    const double vl = loss(model, validation_set);
    h.train_loss.push_back(tl);
    h.validation_loss.push_back(vl);
    if (!std::isfinite(tl) || !std::isfinite(vl) || !theta.allFinite()) {
      throw TrainingFailed("loss diverged at epoch " + std::to_string(epoch), h.train_loss);
    }
    if (vl < best_val) {
      best_val = vl;
      best = theta;
      h.best_epoch = epoch + 1;
    }
    h.best_validation_loss.push_back(best_val);
  }
  model.set_parameters(best);
  result.model = std::move(model);
  return result;
}

double predict_cost(const MlpModel& model, const FeatureVector& x, const CostWeights& w) {
  const Eigen::Vector3d c = model.forward(x);
  return total_cost(c[0], c[1], c[2], w);
}

namespace {

using nlohmann::json;

json to_array(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Eigen::VectorXd vector_at(const json& j, const std::string& path, Eigen::Index size) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != size) {
    throw ParseError(path, "expected an array of " + std::to_string(size) + " numbers");
  }
  Eigen::VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) {
    const auto& x = j[static_cast<std::size_t>(i)];
    if (!x.is_number()) throw ParseError(path + "[" + std::to_string(i) + "]", "expected a number");
    v[i] = x.get<double>();
  }
  return v;
}

const json& field(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) throw ParseError(path.empty() ? key : path + "." + key, "missing field");
  return j.at(key);
}

}  // namespace

std::string MlpModel::to_json() const {
  json j;
  j["schema_version"] = 1;
  j["layer_sizes"] = layer_sizes;
  j["hidden_activation"] = "tanh";
  j["output_activation"] = "softplus";
  json layers = json::array();
  for (std::size_t l = 0; l < weights.size(); ++l) {
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(weights[l].size()));
    for (Eigen::Index r = 0; r < weights[l].rows(); ++r)
      for (Eigen::Index c = 0; c < weights[l].cols(); ++c) w.push_back(weights[l](r, c));
    layers.push_back({{"weights", w}, {"biases", to_array(biases[l])}});
  }
  j["layers"] = layers;
  j["input_mean"] = to_array(input_mean);
  j["input_scale"] = to_array(input_scale);
  j["output_scale"] = to_array(output_scale);
  j["scale_feature"] = scale_feature;
  j["scale_exponent"] = to_array(scale_exponent);
  return j.dump(2) + "\n";
}

MlpModel MlpModel::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("", e.what());
  }
  const auto version = field(j, "schema_version", "");
  if (!version.is_number_integer() || version.get<int>() != 1) throw ParseError("schema_version", "unsupported version");
  MlpModel m;
  const auto& sizes = field(j, "layer_sizes", "");
  if (!sizes.is_array()) throw ParseError("layer_sizes", "expected an array");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (!sizes[i].is_number_integer() || sizes[i].get<int>() <= 0) {
      throw ParseError("layer_sizes[" + std::to_string(i) + "]", "expected a positive integer");
    }
    m.layer_sizes.push_back(sizes[i].get<int>());
  }
  if (m.layer_sizes.size() < 2 || m.layer_sizes.back() != 3) throw ParseError("layer_sizes", "need >= 2 layers ending in 3");
  const auto& layers = field(j, "layers", "");
  if (!layers.is_array() || layers.size() != m.layer_sizes.size() - 1) throw ParseError("layers", "wrong layer count");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::string path = "layers[" + std::to_string(l) + "]";
    const int in = m.layer_sizes[l];
    const int out = m.layer_sizes[l + 1];
    const Eigen::VectorXd w = vector_at(field(layers[l], "weights", path), path + ".weights", in * out);
    Eigen::MatrixXd wm(out, in);
    for (int r = 0; r < out; ++r)
      for (int c = 0; c < in; ++c) wm(r, c) = w[r * in + c];
    m.weights.push_back(wm);
    m.biases.push_back(vector_at(field(layers[l], "biases", path), path + ".biases", out));
  }
  m.input_mean = vector_at(field(j, "input_mean", ""), "input_mean", m.layer_sizes.front());
  m.input_scale = vector_at(field(j, "input_scale", ""), "input_scale", m.layer_sizes.front());
  m.output_scale = vector_at(field(j, "output_scale", ""), "output_scale", 3);
  const auto& sf = field(j, "scale_feature", "");
  if (!sf.is_number_integer()) throw ParseError("scale_feature", "expected an integer");
  m.scale_feature = sf.get<int>();
  m.scale_exponent = vector_at(field(j, "scale_exponent", ""), "scale_exponent", 3);
  try {
    m.validate();
  } catch (const InvalidModel& e) {
    throw ParseError("layers", e.what());
  }
  return m;
}

}  // namespace wrenchgrasp
