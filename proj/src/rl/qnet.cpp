#include "plumeig/rl/qnet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "plumeig/errors.hpp"

namespace plumeig::rl {

namespace {

void check_sizes(const std::vector<int>& sizes) {
  if (sizes.size() < 2) throw ConfigError("qnet: need at least an input and an output layer");
  for (int s : sizes) {
    if (s < 1) throw ConfigError("qnet: layer sizes must be >= 1");
  }
}

Eigen::VectorXd to_vector(const Observation& obs) {
  return Eigen::Map<const Eigen::VectorXd>(obs.data(), kObservationSize);
}

}  // namespace

QNet::QNet(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes)) {
  check_sizes(sizes_);
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    layers_.push_back({Eigen::MatrixXd::Zero(sizes_[l + 1], sizes_[l]), Eigen::VectorXd::Zero(sizes_[l + 1])});
  }
}

QNet::QNet(std::vector<int> layer_sizes, Rng& rng) : QNet(std::move(layer_sizes)) {
  for (Layer& layer : layers_) {
    const double bound = std::sqrt(6.0 / static_cast<double>(layer.weight.cols()));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (Eigen::Index c = 0; c < layer.weight.cols(); ++c)
      for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) layer.weight(r, c) = u(rng);
  }
}

Eigen::MatrixXd QNet::forward_batch(const Eigen::MatrixXd& inputs) const {
  Eigen::MatrixXd h = inputs;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::MatrixXd z = layers_[l].weight * h;
    z.colwise() += layers_[l].bias;
    h = (l + 1 < layers_.size()) ? Eigen::MatrixXd(z.cwiseMax(0.0)) : z;
  }
  return h;
}

Eigen::VectorXd QNet::forward(const Eigen::VectorXd& input) const { return forward_batch(input); }

Eigen::VectorXd QNet::forward(const Observation& obs) const { return forward(to_vector(obs)); }

std::size_t QNet::parameter_count() const {
  std::size_t n = 0;
  for (const Layer& layer : layers_) n += layer.weight.size() + layer.bias.size();
  return n;
}

std::vector<double> QNet::parameters() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const Layer& layer : layers_) {
    flat.insert(flat.end(), layer.weight.data(), layer.weight.data() + layer.weight.size());
    flat.insert(flat.end(), layer.bias.data(), layer.bias.data() + layer.bias.size());
  }
  return flat;
}

void QNet::set_parameters(std::span<const double> flat) {
  if (flat.size() != parameter_count()) throw ConfigError("qnet: parameter vector has the wrong length");
  std::size_t k = 0;
  for (Layer& layer : layers_) {
    std::copy_n(flat.begin() + k, layer.weight.size(), layer.weight.data());
    k += layer.weight.size();
    std::copy_n(flat.begin() + k, layer.bias.size(), layer.bias.data());
    k += layer.bias.size();
  }
}

std::vector<int> default_layer_sizes(std::span<const int> hidden) {
  std::vector<int> sizes{kObservationSize};
  if (hidden.empty()) {
    sizes.insert(sizes.end(), {64, 64});
  } else {
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  }
  sizes.push_back(kActionCount);
  return sizes;
}

TdLoss td_loss_and_gradient(const QNet& net, const QNet& target, std::span<const Transition> batch, double gamma,
                            const ActionMask& mask) {
  const Eigen::Index n = static_cast<Eigen::Index>(batch.size());
  if (n == 0) throw ConfigError("td: empty batch");
  const int in = net.layer_sizes().front();
  Eigen::MatrixXd x(in, n);
  Eigen::MatrixXd x_next(in, n);
  for (Eigen::Index b = 0; b < n; ++b) {
    x.col(b) = Eigen::Map<const Eigen::VectorXd>(batch[b].obs.data(), in);
    x_next.col(b) = Eigen::Map<const Eigen::VectorXd>(batch[b].next_obs.data(), in);
  }

  const Eigen::MatrixXd q_next = target.forward_batch(x_next);
  Eigen::VectorXd y(n);
  for (Eigen::Index b = 0; b < n; ++b) {
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < q_next.rows(); ++a) {
      if (mask[a]) best = std::max(best, q_next(a, b));
    }
    y(b) = batch[b].reward + (batch[b].done ? 0.0 : gamma * best);
  }

  // Forward pass keeping activations.
  const auto& layers = net.layers();
  std::vector<Eigen::MatrixXd> acts{x};
  std::vector<Eigen::MatrixXd> pre;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Eigen::MatrixXd z = layers[l].weight * acts.back();
    z.colwise() += layers[l].bias;
    pre.push_back(z);
    acts.push_back(l + 1 < layers.size() ? Eigen::MatrixXd(z.cwiseMax(0.0)) : z);
  }

  const Eigen::MatrixXd& q = acts.back();
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(q.rows(), n);
  double loss = 0.0;
  for (Eigen::Index b = 0; b < n; ++b) {
    const double err = q(batch[b].action, b) - y(b);
    loss += err * err;
    delta(batch[b].action, b) = 2.0 * err / static_cast<double>(n);
  }
  loss /= static_cast<double>(n);

  std::vector<Eigen::MatrixXd> grad_w(layers.size());
  std::vector<Eigen::VectorXd> grad_b(layers.size());
  for (std::size_t l = layers.size(); l-- > 0;) {
    grad_w[l] = delta * acts[l].transpose();
    grad_b[l] = delta.rowwise().sum();
    if (l > 0) {
      delta = (layers[l].weight.transpose() * delta).cwiseProduct((pre[l - 1].array() > 0.0).cast<double>().matrix());
    }
  }

  TdLoss out;
  out.loss = loss;
  out.gradient.reserve(net.parameter_count());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    out.gradient.insert(out.gradient.end(), grad_w[l].data(), grad_w[l].data() + grad_w[l].size());
    out.gradient.insert(out.gradient.end(), grad_b[l].data(), grad_b[l].data() + grad_b[l].size());
  }
  return out;
}

double td_train_step(QNet& net, const QNet& target, std::span<const Transition> batch, double gamma,
                     double learning_rate, const ActionMask& mask) {
  const TdLoss td = td_loss_and_gradient(net, target, batch, gamma, mask);
  std::size_t k = 0;
  for (QNet::Layer& layer : net.layers()) {
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] -= learning_rate * td.gradient[k++];
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias.data()[i] -= learning_rate * td.gradient[k++];
  }
  return td.loss;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ConfigError("replay: capacity must be >= 1");
  items_.reserve(capacity_);
}

void ReplayBuffer::push(const Transition& t) {
  if (items_.size() < capacity_) {
    items_.push_back(t);
  } else {
    items_[next_] = t;
  }
  next_ = (next_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t count, Rng& rng) const {
  if (items_.size() < count) throw ConfigError("replay: not enough transitions to sample a batch");
  std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
  std::vector<std::size_t> idx(count);
  for (std::size_t& k : idx) k = pick(rng);
  return idx;
}

std::vector<Transition> ReplayBuffer::sample(std::size_t count, Rng& rng) const {
  std::vector<Transition> out;
  out.reserve(count);
  for (std::size_t k : sample_indices(count, rng)) out.push_back(items_[k]);
  return out;
}

double EpsilonSchedule::operator()(long t) const {
  if (t >= decay_steps || decay_steps <= 0) return min;
  return start + (min - start) * static_cast<double>(t) / static_cast<double>(decay_steps);
}

}  // namespace plumeig::rl
