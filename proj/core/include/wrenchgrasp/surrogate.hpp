#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wrenchgrasp/breakdown.hpp"
#include "wrenchgrasp/grasp.hpp"
#include "wrenchgrasp/motion.hpp"
#include "wrenchgrasp/spatial.hpp"

namespace wrenchgrasp {

inline constexpr std::size_t kFeatureCount = 10;
inline constexpr std::size_t kImpulseFeature = 6;

/// Frame-invariant scalars, in order:
///   0 lever length |r_g|, r_g = c_e - grasp origin   5 angular speed |omega|
///   1 moment arm |r_g x n|                           6 ln max(J, 1e-6 N s), J the normal impulse
///   2 angle(+-n_finger, n) in [0, pi/2]              7 mean curvature proxy at the pads
///   3 |cos(closure, unit(r_g x n))|                  8 jaw width
///   4 approach speed                                 9 event count
/// Event quantities come from the fastest-approach contact event. J folds
/// mass, inertia, COM lever and restitution into one grasp-independent scalar.
using FeatureVector = Eigen::VectorXd;

/// Throws InvalidInput for an empty cloud.
FeatureVector featurize(const GraspCandidate& g, const PointCloud& cloud, const Trajectory& trajectory,
                        const ContactParams& contact, const RigidBodyModel& body, double patch_radius = 0.01);

struct LabeledExample {
  FeatureVector x;
  Eigen::Vector3d y = Eigen::Vector3d::Zero();  // (c_tau, c_slip, c_align)
  std::size_t group = 0;                         // scenario id
};

/// Fully connected tanh network with softplus output heads. Inputs are
/// standardized, and each head is multiplied by a fixed positive scale so the
/// initial output sits near the mean target. With scale_feature >= 0, head k
/// is further multiplied by exp(scale_exponent[k] * x[scale_feature]) of the
/// raw input.
struct MlpModel {
  std::vector<int> layer_sizes;
  std::vector<Eigen::MatrixXd> weights;  // weights[l] is (out x in)
  std::vector<Eigen::VectorXd> biases;
  Eigen::VectorXd input_mean;
  Eigen::VectorXd input_scale;
  Eigen::VectorXd output_scale;
  int scale_feature = -1;
  Eigen::Vector3d scale_exponent = Eigen::Vector3d::Zero();

  /// Xavier-uniform weights, zero hidden biases, output biases at softplus^-1(1).
  static MlpModel initialize(std::vector<int> layer_sizes, std::uint64_t seed);

  std::size_t parameter_count() const;
  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& flat);

  /// Throws InvalidInput on a dimension mismatch.
  Eigen::Vector3d forward(const FeatureVector& x) const;
  void validate() const;

  std::string to_json() const;
  static MlpModel from_json(const std::string& text);
};

/// Mean over examples of the summed squared error of the three heads.
double loss(const MlpModel& model, std::span<const LabeledExample> data);

/// Gradient of `loss` with respect to `parameters()`.
Eigen::VectorXd loss_gradient(const MlpModel& model, std::span<const LabeledExample> data);

/// |g - g_fd| / max(|g|, |g_fd|) for the analytic gradient g against
/// central differences g_fd, with vector 2-norms.
double gradient_check(const MlpModel& model, std::span<const LabeledExample> data, double h = 1e-6);

enum class Optimizer { adam, momentum };

std::string to_string(Optimizer o);
Optimizer optimizer_from_string(const std::string& name);

struct TrainConfig {
  std::vector<int> hidden = {64, 64};
  Optimizer optimizer = Optimizer::adam;
  double learning_rate = 1e-3;
  double momentum = 0.9;       // heavy-ball coefficient, or Adam beta1
  double beta2 = 0.999;        // Adam only
  std::size_t epochs = 600;
  std::size_t batch_size = 32;
  /// Batch gradients longer than this are rescaled to it; 0 disables.
  double clip_norm = 0.0;
  /// Scale the torque and slip heads by the impulse feature.
  bool impulse_scaled_heads = true;
  std::uint64_t seed = 0;
};

struct TrainHistory {
  std::vector<double> train_loss;
  std::vector<double> validation_loss;
  std::vector<double> best_validation_loss;  // non-increasing
  std::size_t best_epoch = 0;
};

struct TrainResult {
  MlpModel model;  // parameters at the best validation loss
  TrainHistory history;
};

/// Mini-batch Adam (or heavy-ball momentum) on `loss`. Throws
/// InvalidInput with fewer than 100 examples or an empty validation set and
/// TrainingFailed when the loss stops being finite.
TrainResult train(std::span<const LabeledExample> train_set, std::span<const LabeledExample> validation_set,
                  const TrainConfig& cfg);

/// w_tau C_tau + w_s C_s + w_alpha C_alpha on the predicted heads.
double predict_cost(const MlpModel& model, const FeatureVector& x, const CostWeights& w);

}  // namespace wrenchgrasp
