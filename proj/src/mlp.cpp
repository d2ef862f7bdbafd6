#include "limase/mlp.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "limase/error.hpp"

namespace limase {

MlpModel::MlpModel(std::vector<Layer> layers, Task task, std::vector<double> input_mean,
                   std::vector<double> input_scale, double target_mean, double target_scale)
    : layers_(std::move(layers)),
      task_(task),
      input_mean_(std::move(input_mean)),
      input_scale_(std::move(input_scale)),
      target_mean_(target_mean),
      target_scale_(target_scale) {
  if (layers_.empty()) throw InvalidArgument("mlp needs at least one layer");
  if (input_mean_.size() != input_scale_.size()) {
    throw InvalidArgument("mlp input statistics have different lengths");
  }
  auto in = static_cast<Eigen::Index>(input_mean_.size());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    if (layer.weight.cols() != in || layer.bias.size() != layer.weight.rows()) {
      throw InvalidArgument("mlp layer " + std::to_string(l) + " dimensions do not chain");
    }
    in = layer.weight.rows();
  }
  if (static_cast<std::size_t>(in) != task_.output_width()) {
    throw InvalidArgument("mlp output width does not match the task");
  }
  if (!(target_scale_ > 0.0)) throw InvalidArgument("mlp target scale must be positive");
}

MlpModel MlpModel::initialize(std::size_t num_features, const std::vector<std::size_t>& hidden,
                              Task task, RandomStream& rng) {
  std::vector<std::size_t> widths{num_features};
  for (auto h : hidden) {
    if (h < 1) throw InvalidArgument("mlp hidden widths must be >= 1");
    widths.push_back(h);
  }
  widths.push_back(task.output_width());
  std::vector<Layer> layers;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const auto in = static_cast<Eigen::Index>(widths[l]);
    const auto out = static_cast<Eigen::Index>(widths[l + 1]);
    Layer layer{Eigen::MatrixXd(out, in), Eigen::VectorXd::Zero(out)};
    const double scale = std::sqrt(2.0 / static_cast<double>(in));
    for (Eigen::Index c = 0; c < in; ++c) {
      for (Eigen::Index r = 0; r < out; ++r) layer.weight(r, c) = scale * rng.gaussian();
    }
    layers.push_back(std::move(layer));
  }
  return MlpModel(std::move(layers), task, std::vector<double>(num_features, 0.0),
                  std::vector<double>(num_features, 1.0));
}

std::vector<std::size_t> MlpModel::layer_widths() const {
  std::vector<std::size_t> w{input_mean_.size()};
  for (const auto& l : layers_) w.push_back(static_cast<std::size_t>(l.weight.rows()));
  return w;
}

Eigen::MatrixXd MlpModel::standardized(const Matrix& rows) const {
  const auto d = input_mean_.size();
  if (rows.rows() > 0 && rows.cols() != d) {
    throw InvalidArgument("mlp expects " + std::to_string(d) + " features, got " +
                          std::to_string(rows.cols()));
  }
  Eigen::MatrixXd a(static_cast<Eigen::Index>(rows.rows()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          (rows(i, j) - input_mean_[j]) / input_scale_[j];
    }
  }
  return a;
}

std::vector<Eigen::MatrixXd> MlpModel::forward(const Eigen::MatrixXd& input) const {
  std::vector<Eigen::MatrixXd> acts{input};
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    Eigen::MatrixXd z = acts.back() * layer.weight.transpose();
    z.rowwise() += layer.bias.transpose();
    if (l + 1 < layers_.size()) {
      z = z.cwiseMax(0.0);
    } else if (task_.is_classification()) {
      for (Eigen::Index r = 0; r < z.rows(); ++r) {
        const double m = z.row(r).maxCoeff();
        z.row(r) = (z.row(r).array() - m).exp().matrix();
        z.row(r) /= z.row(r).sum();
      }
    }
    acts.push_back(std::move(z));
  }
  return acts;
}

ModelOutput MlpModel::predict(const Matrix& rows) const {
  const auto out = forward(standardized(rows)).back();
  ModelOutput result(rows.rows(), task_.output_width());
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
      double v = out(r, c);
      if (!task_.is_classification()) v = v * target_scale_ + target_mean_;
      result(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = v;
    }
  }
  return result;
}

std::vector<double> MlpModel::parameters() const {
  std::vector<double> p;
  for (const auto& l : layers_) {
    p.insert(p.end(), l.weight.data(), l.weight.data() + l.weight.size());
    p.insert(p.end(), l.bias.data(), l.bias.data() + l.bias.size());
  }
  return p;
}

void MlpModel::set_parameters(std::span<const double> params) {
  std::size_t k = 0;
  for (auto& l : layers_) {
    const auto need = static_cast<std::size_t>(l.weight.size() + l.bias.size());
    if (k + need > params.size()) throw InvalidArgument("mlp parameter vector too short");
    std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(k), l.weight.size(), l.weight.data());
    k += static_cast<std::size_t>(l.weight.size());
    std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(k), l.bias.size(), l.bias.data());
    k += static_cast<std::size_t>(l.bias.size());
  }
  if (k != params.size()) throw InvalidArgument("mlp parameter vector too long");
}

double MlpModel::loss_and_gradient(const Matrix& x, std::span<const double> y,
                                   std::vector<double>* grad) const {
  const auto n = static_cast<Eigen::Index>(x.rows());
  if (static_cast<std::size_t>(n) != y.size() || n == 0) {
    throw InvalidArgument("mlp loss: X and y lengths differ or are empty");
  }
  const auto acts = forward(standardized(x));
  const auto& out = acts.back();
  Eigen::MatrixXd delta = out;
  double loss = 0.0;
  if (task_.is_classification()) {
    for (Eigen::Index r = 0; r < n; ++r) {
      const auto c = static_cast<Eigen::Index>(y[static_cast<std::size_t>(r)]);
      loss -= std::log(std::max(out(r, c), 1e-300));
      delta(r, c) -= 1.0;
    }
  } else {
    for (Eigen::Index r = 0; r < n; ++r) {
      const double t = (y[static_cast<std::size_t>(r)] - target_mean_) / target_scale_;
      const double e = out(r, 0) - t;
      loss += 0.5 * e * e;
      delta(r, 0) = e;
    }
  }
  loss /= static_cast<double>(n);
  if (grad == nullptr) return loss;

  delta /= static_cast<double>(n);
  std::vector<Eigen::MatrixXd> dw(layers_.size());
  std::vector<Eigen::VectorXd> db(layers_.size());
  for (std::size_t l = layers_.size(); l-- > 0;) {
    dw[l] = delta.transpose() * acts[l];
    db[l] = delta.colwise().sum().transpose();
    if (l == 0) break;
    Eigen::MatrixXd back = delta * layers_[l].weight;
    delta = (acts[l].array() > 0.0).select(back, 0.0);
  }
  grad->clear();
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    grad->insert(grad->end(), dw[l].data(), dw[l].data() + dw[l].size());
    grad->insert(grad->end(), db[l].data(), db[l].data() + db[l].size());
  }
  return loss;
}

MlpModel fit_mlp(const Dataset& data, const MlpParams& params, RandomStream& rng) {
  if (params.epochs < 1) throw InvalidArgument("fit_mlp: epochs must be >= 1");
  if (params.batch_size < 1) throw InvalidArgument("fit_mlp: batch_size must be >= 1");
  if (!(params.learning_rate > 0.0)) throw InvalidArgument("fit_mlp: learning rate must be > 0");
  const auto n = data.num_rows();
  if (n == 0) throw InvalidArgument("fit_mlp: empty dataset");
  const auto d = data.num_features();

  auto init = MlpModel::initialize(d, params.hidden, data.task(), rng);
  std::vector<double> mean(d);
  std::vector<double> scale(d);
  for (std::size_t j = 0; j < d; ++j) {
    mean[j] = data.features()[j].mean;
    scale[j] = data.features()[j].std > 0.0 ? data.features()[j].std : 1.0;
  }
  double t_mean = 0.0;
  double t_scale = 1.0;
  if (!data.task().is_classification()) {
    const auto& t = data.target();
    t_mean = std::accumulate(t.begin(), t.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : t) ss += (v - t_mean) * (v - t_mean);
    const double sd = std::sqrt(ss / static_cast<double>(n));
    t_scale = sd > 0.0 ? sd : 1.0;
  }
  MlpModel model(init.layers(), data.task(), mean, scale, t_mean, t_scale);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto theta = model.parameters();
  std::vector<double> grad;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.uniform_index(i)]);
    for (std::size_t start = 0; start < n; start += params.batch_size) {
      const auto stop = std::min(n, start + params.batch_size);
      Matrix bx(0, d);
      std::vector<double> by;
      for (std::size_t k = start; k < stop; ++k) {
        bx.append_row(data.row(order[k]));
        by.push_back(data.target()[order[k]]);
      }
      model.loss_and_gradient(bx, by, &grad);
      for (std::size_t p = 0; p < theta.size(); ++p) theta[p] -= params.learning_rate * grad[p];
      model.set_parameters(theta);
    }
  }
  return model;
}

}  // namespace limase
