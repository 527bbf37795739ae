/*
 * Copyright 2026 The susp Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <Eigen/Dense>

#include <cmath>

#include "gbdt_internal.hpp"

namespace susp::model::detail {

// L2-regularized logistic regression on standardized columns, fitted by
// Newton iterations. The intercept is unpenalized.
void fit_logistic(const std::vector<double>& x, std::size_t n, std::size_t m,
                  std::span<const int> y, const LogisticParams& p, TrainedModel& out) {
  out.center.assign(m, 0.0);
  out.scale.assign(m, 1.0);
  for (std::size_t j = 0; j < m; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i * m + j];
    const double mu = s / static_cast<double>(n);
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) v += (x[i * m + j] - mu) * (x[i * m + j] - mu);
    const double sd = std::sqrt(v / static_cast<double>(n));
    out.center[j] = mu;
    out.scale[j] = sd > 0.0 ? sd : 0.0;
  }
  const auto N = static_cast<Eigen::Index>(n);
  const auto M = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd z(N, M + 1);
  for (Eigen::Index i = 0; i < N; ++i) {
    z(i, 0) = 1.0;
    for (Eigen::Index j = 0; j < M; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      const double sd = out.scale[ju];
      z(i, j + 1) = sd > 0.0
                        ? (x[static_cast<std::size_t>(i) * m + ju] - out.center[ju]) / sd
                        : 0.0;
    }
  }
  Eigen::VectorXd yv(N);
  for (Eigen::Index i = 0; i < N; ++i) yv(i) = y[static_cast<std::size_t>(i)];

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(M + 1);
  Eigen::VectorXd reg = Eigen::VectorXd::Constant(M + 1, p.l2);
  reg(0) = 0.0;
  out.training_loss.clear();
  for (int it = 0; it < p.max_iter; ++it) {
    const Eigen::VectorXd eta = z * beta;
    Eigen::VectorXd prob(N);
    Eigen::VectorXd w(N);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < N; ++i) {
      const double e = eta(i);
      prob(i) = 1.0 / (1.0 + std::exp(-e));
      w(i) = std::max(prob(i) * (1.0 - prob(i)), 1e-12);
      const double zz = yv(i) > 0.5 ? e : -e;
      loss += zz > 0 ? std::log1p(std::exp(-zz)) : -zz + std::log1p(std::exp(zz));
    }
    loss += 0.5 * (reg.array() * beta.array().square()).sum();
    out.training_loss.push_back(loss / static_cast<double>(n));
    const Eigen::VectorXd grad = z.transpose() * (prob - yv) + reg.cwiseProduct(beta);
    Eigen::MatrixXd hess = z.transpose() * w.asDiagonal() * z;
    hess.diagonal() += reg;
    hess.diagonal().array() += 1e-10;
    const Eigen::VectorXd step = hess.ldlt().solve(grad);
    beta -= step;
    if (step.lpNorm<Eigen::Infinity>() < p.tol) break;
  }
  out.bias = beta(0);
  out.weights.assign(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) out.weights[j] = beta(static_cast<Eigen::Index>(j) + 1);
}

}  // namespace susp::model::detail
