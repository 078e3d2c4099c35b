#pragma once

#include <Eigen/Dense>

#include <array>
#include <span>
#include <vector>

#include "plumeig/rl/env.hpp"
#include "plumeig/rng.hpp"

namespace plumeig::rl {

/// Feed-forward action-value network: ReLU hidden layers, linear output.
class QNet {
 public:
  struct Layer {
    Eigen::MatrixXd weight;  // out x in
    Eigen::VectorXd bias;
  };

  QNet() = default;
  /// He-uniform initialization from `rng`; biases start at zero.
  QNet(std::vector<int> layer_sizes, Rng& rng);
  /// All-zero parameters.
  explicit QNet(std::vector<int> layer_sizes);

  Eigen::VectorXd forward(const Eigen::VectorXd& input) const;
  Eigen::VectorXd forward(const Observation& obs) const;
  /// One sample per column.
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& inputs) const;

  const std::vector<int>& layer_sizes() const { return sizes_; }
  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }

  std::size_t parameter_count() const;
  /// Flattened per layer: weight (column-major) then bias.
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> flat);

 private:
  std::vector<int> sizes_;
  std::vector<Layer> layers_;
};

/// The default 17 -> 64 -> 64 -> 5 architecture.
std::vector<int> default_layer_sizes(std::span<const int> hidden = {});

struct Transition {
  Observation obs{};
  int action = 0;
  double reward = 0.0;
  Observation next_obs{};
  bool done = false;
};

using ActionMask = std::array<bool, kActionCount>;
inline constexpr ActionMask kAllActions{true, true, true, true, true};

struct TdLoss {
  double loss = 0.0;
  std::vector<double> gradient;  // same layout as QNet::parameters()
};

/// Mean squared TD error against r + gamma (1 - done) max_{a' in mask} Q_target(s', a'),
/// and its gradient with respect to the online parameters.
TdLoss td_loss_and_gradient(const QNet& net, const QNet& target, std::span<const Transition> batch, double gamma,
                            const ActionMask& mask = kAllActions);

/// One plain SGD step on `net`; returns the loss before the step.
double td_train_step(QNet& net, const QNet& target, std::span<const Transition> batch, double gamma,
                     double learning_rate, const ActionMask& mask = kAllActions);

/// Fixed-capacity ring buffer with uniform sampling (with replacement).
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(const Transition& t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& operator[](std::size_t k) const { return items_[k]; }

  /// Indices of `count` uniformly drawn items.
  std::vector<std::size_t> sample_indices(std::size_t count, Rng& rng) const;
  std::vector<Transition> sample(std::size_t count, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> items_;
};

struct EpsilonSchedule {
  double start = 1.0;
  double min = 0.05;
  long decay_steps = 10000;

  /// Linear from start to min over decay_steps, constant after.
  double operator()(long t) const;
};

}  // namespace plumeig::rl
