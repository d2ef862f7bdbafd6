#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "limase/dataset.hpp"
#include "limase/model.hpp"
#include "limase/random.hpp"

namespace limase {

struct MlpParams {
  std::vector<std::size_t> hidden{32};
  int epochs = 200;
  double learning_rate = 0.05;
  std::size_t batch_size = 32;
};

// Feed-forward network with rectifier hidden layers and a softmax
// (classification) or identity (regression) output. Inputs are standardized
// with the training statistics stored in the model; regression targets are
// learned in standardized units and mapped back on output.
class MlpModel : public BlackBoxModel {
 public:
  struct Layer {
    Eigen::MatrixXd weight;  // out x in
    Eigen::VectorXd bias;
  };

  MlpModel(std::vector<Layer> layers, Task task, std::vector<double> input_mean,
           std::vector<double> input_scale, double target_mean = 0.0,
           double target_scale = 1.0);

  // Freshly initialized (He-normal weights, zero biases) network.
  static MlpModel initialize(std::size_t num_features, const std::vector<std::size_t>& hidden,
                             Task task, RandomStream& rng);

  ModelOutput predict(const Matrix& rows) const override;
  Task task() const override { return task_; }
  std::size_t num_features() const override { return input_mean_.size(); }

  std::vector<std::size_t> layer_widths() const;
  const std::vector<Layer>& layers() const { return layers_; }
  const std::vector<double>& input_mean() const { return input_mean_; }
  const std::vector<double>& input_scale() const { return input_scale_; }
  double target_mean() const { return target_mean_; }
  double target_scale() const { return target_scale_; }

  // All weights and biases, layer by layer (weights column-major).
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> params);

  // Mean training loss on a batch (cross-entropy, or half squared error in
  // standardized target units) and, if `grad` is non-null, its gradient with
  // respect to parameters().
  double loss_and_gradient(const Matrix& x, std::span<const double> y,
                           std::vector<double>* grad) const;

 private:
  Eigen::MatrixXd standardized(const Matrix& rows) const;
  // Activations of every layer for a batch; back() is the output.
  std::vector<Eigen::MatrixXd> forward(const Eigen::MatrixXd& input) const;

  std::vector<Layer> layers_;
  Task task_;
  std::vector<double> input_mean_;
  std::vector<double> input_scale_;
  double target_mean_;
  double target_scale_;
};

// Mini-batch SGD on the loss above. Deterministic for a given rng state.
MlpModel fit_mlp(const Dataset& data, const MlpParams& params, RandomStream& rng);

}  // namespace limase
