#include <gtest/gtest.h>

#include <cmath>

#include "limase/error.hpp"
#include "limase/mlp.hpp"
#include "test_util.hpp"

namespace limase {
namespace {

Dataset xor_data(std::size_t n, std::uint64_t seed) {
  RandomStream rng(seed);
  Matrix x(n, 2);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x(i, 0) = 2.0 * rng.uniform() - 1.0;
    x(i, 1) = 2.0 * rng.uniform() - 1.0;
    y[i] = (x(i, 0) > 0) != (x(i, 1) > 0) ? 1.0 : 0.0;
  }
  return Dataset({"a", "b"}, x, y, Task::classification(2));
}

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

void check_gradient(const MlpModel& base, const Matrix& x, const std::vector<double>& y) {
  MlpModel m = base;
  // Zero biases can put a preactivation exactly on the ReLU kink, where the
  // central difference averages two one-sided slopes.
  RandomStream jitter(99);
  auto start = m.parameters();
  for (auto& v : start) v += 0.3 * jitter.gaussian();
  m.set_parameters(start);
  std::vector<double> grad;
  m.loss_and_gradient(x, y, &grad);
  auto params = m.parameters();
  ASSERT_EQ(grad.size(), params.size());
  const double h = 1e-5;
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double saved = params[k];
    params[k] = saved + h;
    m.set_parameters(params);
    const double up = m.loss_and_gradient(x, y, nullptr);
    params[k] = saved - h;
    m.set_parameters(params);
    const double down = m.loss_and_gradient(x, y, nullptr);
    params[k] = saved;
    m.set_parameters(params);
    const double numeric = (up - down) / (2.0 * h);
    EXPECT_LE(relative_error(grad[k], numeric), 1e-4)
        << "parameter " << k << ": analytic " << grad[k] << " numeric " << numeric;
  }
}

TEST(Mlp, GradientMatchesFiniteDifferencesClassification) {
  RandomStream rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const auto m = MlpModel::initialize(2, {2}, Task::classification(2), rng);
    const Matrix x{{0.3, -1.2}, {1.5, 0.2}, {-0.7, 0.9}};
    check_gradient(m, x, {0, 1, 1});
  }
}

TEST(Mlp, GradientMatchesFiniteDifferencesRegression) {
  RandomStream rng(22);
  const auto m = MlpModel::initialize(3, {4, 3}, Task::regression(), rng);
  const Matrix x{{0.3, -1.2, 2.0}, {1.5, 0.2, -0.1}, {-0.7, 0.9, 0.4}, {0.0, 0.1, 0.2}};
  check_gradient(m, x, {1.0, -2.0, 0.5, 3.0});
}

TEST(Mlp, OneEpochIsWellFormed) {
  const auto d = xor_data(50, 1);
  RandomStream rng(2);
  MlpParams p;
  p.epochs = 1;
  const auto m = fit_mlp(d, p, rng);
  for (double v : m.parameters()) EXPECT_TRUE(std::isfinite(v));
  const auto out = m.predict(d.rows());
  validate_output(out, d.num_rows(), d.task());
  for (std::size_t i = 0; i < out.rows(); ++i) EXPECT_NEAR(out(i, 0) + out(i, 1), 1.0, 1e-6);
}

TEST(Mlp, LearnsXor) {
  const auto d = xor_data(400, 3);
  RandomStream rng(4);
  MlpParams p;
  p.hidden = {8};
  p.epochs = 500;
  const auto m = fit_mlp(d, p, rng);
  const auto out = m.predict(d.rows());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < d.num_rows(); ++i) {
    hits += (out(i, 1) > out(i, 0)) == (d.target()[i] == 1.0);
  }
  EXPECT_GE(static_cast<double>(hits) / d.num_rows(), 0.9);
}

TEST(Mlp, RegressionFitsLinearTarget) {
  RandomStream rng(5);
  Matrix x(300, 3);
  std::vector<double> y(300);
  for (std::size_t i = 0; i < 300; ++i) {
    for (std::size_t j = 0; j < 3; ++j) x(i, j) = rng.gaussian() * 10.0 + 50.0;
    y[i] = 2.0 * x(i, 0) - x(i, 2) + 1000.0;
  }
  const Dataset d({"a", "b", "c"}, x, y, Task::regression());
  MlpParams p;
  p.epochs = 100;
  const auto m = fit_mlp(d, p, rng);
  const auto out = m.predict(x);
  double sse = 0.0;
  double sst = 0.0;
  double mean = 0.0;
  for (double v : y) mean += v / 300.0;
  for (std::size_t i = 0; i < 300; ++i) {
    sse += (out(i, 0) - y[i]) * (out(i, 0) - y[i]);
    sst += (y[i] - mean) * (y[i] - mean);
  }
  EXPECT_GE(1.0 - sse / sst, 0.95);
}

TEST(Mlp, DeterministicGivenSeed) {
  const auto d = xor_data(80, 6);
  MlpParams p;
  p.epochs = 5;
  RandomStream a(7);
  RandomStream b(7);
  EXPECT_EQ(fit_mlp(d, p, a).parameters(), fit_mlp(d, p, b).parameters());
}

TEST(Mlp, Errors) {
  const auto d = xor_data(10, 1);
  RandomStream rng(1);
  MlpParams p;
  p.epochs = 0;
  EXPECT_THROW(fit_mlp(d, p, rng), InvalidArgument);
  p.epochs = 1;
  p.hidden = {0};
  EXPECT_THROW(fit_mlp(d, p, rng), InvalidArgument);
  const auto m = MlpModel::initialize(2, {3}, Task::classification(2), rng);
  EXPECT_THROW(m.predict(Matrix{{1, 2, 3}}), InvalidArgument);
  EXPECT_EQ(m.layer_widths(), (std::vector<std::size_t>{2, 3, 2}));
  auto params = m.parameters();
  params.pop_back();
  auto copy = m;
  EXPECT_THROW(copy.set_parameters(params), InvalidArgument);
}

}  // namespace
}  // namespace limase
