/*
 * Copyright 2026 The Calmet Authors.
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

#include "calmet/fit.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "calmet/core.h"
#include "calmet/stats.h"

namespace calmet::fit {

LogisticFit logistic_irls(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          double ridge, int max_iter, double tol) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  LogisticFit out;
  out.coef = Eigen::VectorXd::Zero(p);
  Eigen::MatrixXd penalty = Eigen::MatrixXd::Identity(p, p) * ridge;
  if (p > 0) penalty(0, 0) = 0.0;
  Eigen::MatrixXd info(p, p);
  for (int iter = 0; iter < max_iter; ++iter) {
    const Eigen::VectorXd eta = x * out.coef;
    Eigen::VectorXd mu(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      mu(i) = sigmoid(eta(i));
      w(i) = std::max(mu(i) * (1.0 - mu(i)), 1e-12);
    }
    const Eigen::VectorXd grad = x.transpose() * (y - mu) - penalty * out.coef;
    info = x.transpose() * w.asDiagonal() * x + penalty;
    Eigen::LDLT<Eigen::MatrixXd> solver(info);
    if (solver.info() != Eigen::Success) break;
    const Eigen::VectorXd step = solver.solve(grad);
    if (!step.allFinite()) break;
    out.coef += step;
    out.iterations = iter + 1;
    if (step.lpNorm<Eigen::Infinity>() < tol) {
      out.converged = true;
      break;
    }
  }
  // Covariance at the final estimate.
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mu = sigmoid(x.row(i).dot(out.coef));
    w(i) = std::max(mu * (1.0 - mu), 1e-12);
  }
  info = x.transpose() * w.asDiagonal() * x + penalty;
  out.cov = info.inverse();
  return out;
}

LinearFit least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  LinearFit out;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  out.rank = static_cast<int>(qr.rank());
  out.coef = qr.solve(y);
  out.residuals = y - x * out.coef;
  if (out.rank == x.cols()) {
    out.xtx_inv = (x.transpose() * x).inverse();
  }
  return out;
}

double local_linear_epanechnikov(std::span<const double> xs,
                                 std::span<const double> ys, double at,
                                 double bandwidth) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, t0 = 0.0, t1 = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double u = (xs[i] - at) / bandwidth;
    if (std::abs(u) >= 1.0) continue;
    const double w = 0.75 * (1.0 - u * u);
    const double d = xs[i] - at;
    s0 += w;
    s1 += w * d;
    s2 += w * d * d;
    t0 += w * ys[i];
    t1 += w * d * ys[i];
  }
  if (s0 <= 0.0) {
    std::size_t nearest = 0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
      if (std::abs(xs[i] - at) < std::abs(xs[nearest] - at)) nearest = i;
    }
    return ys[nearest];
  }
  const double det = s0 * s2 - s1 * s1;
  if (std::abs(det) <= 1e-14 * std::max(1.0, s0 * s2)) return t0 / s0;
  return (s2 * t0 - s1 * t1) / det;
}

std::vector<double> loess(std::span<const double> xs, std::span<const double> ys,
                          double span, int degree) {
  const std::size_t n = xs.size();
  std::vector<double> fitted(n);
  const std::size_t q = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(span * static_cast<double>(n))), 1, n);
  std::vector<double> dist(n);
  std::vector<std::size_t> order(n);
  for (std::size_t at = 0; at < n; ++at) {
    for (std::size_t i = 0; i < n; ++i) dist[i] = std::abs(xs[i] - xs[at]);
    std::iota(order.begin(), order.end(), 0);
    std::nth_element(order.begin(), order.begin() + static_cast<long>(q - 1),
                     order.end(),
                     [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
    double max_d = dist[order[q - 1]];
    if (max_d <= 0.0) max_d = 1e-12;
    // Points at exactly the window radius get zero weight under the tri-cube
    // kernel; widen slightly so the q-th neighbour still counts.
    max_d *= 1.0 + 1e-9;
    const int cols = degree + 1;
    Eigen::MatrixXd xtwx = Eigen::MatrixXd::Zero(cols, cols);
    Eigen::VectorXd xtwy = Eigen::VectorXd::Zero(cols);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = dist[i] / max_d;
      if (u >= 1.0) continue;
      const double t = 1.0 - u * u * u;
      const double w = t * t * t;
      const double d = xs[i] - xs[at];
      Eigen::VectorXd row(cols);
      double pw = 1.0;
      for (int j = 0; j < cols; ++j, pw *= d) row(j) = pw;
      xtwx += w * row * row.transpose();
      xtwy += w * ys[i] * row;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xtwx);
    if (qr.rank() == cols) {
      fitted[at] = qr.solve(xtwy)(0);
    } else if (xtwx(0, 0) > 0.0) {
      fitted[at] = xtwy(0) / xtwx(0, 0);
    } else {
      fitted[at] = ys[at];
    }
  }
  return fitted;
}

Eigen::MatrixXd natural_spline_basis(std::span<const double> x,
                                     std::span<const double> knots) {
  const std::size_t nk = knots.size();
  if (nk < 3) throw Error(ErrorCode::kInvalidArgument, "need at least 3 knots");
  const double tk = knots[nk - 1];
  const double tk1 = knots[nk - 2];
  const double scale = (tk - knots[0]) * (tk - knots[0]);
  auto cube = [](double v) { return v > 0.0 ? v * v * v : 0.0; };
  Eigen::MatrixXd basis(static_cast<Eigen::Index>(x.size()),
                        static_cast<Eigen::Index>(nk - 1));
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    basis(r, 0) = x[i];
    for (std::size_t j = 0; j + 2 < nk; ++j) {
      const double tj = knots[j];
      const double v = cube(x[i] - tj) -
                       cube(x[i] - tk1) * (tk - tj) / (tk - tk1) +
                       cube(x[i] - tk) * (tk1 - tj) / (tk - tk1);
      basis(r, static_cast<Eigen::Index>(j + 1)) = v / scale;
    }
  }
  return basis;
}

}  // namespace calmet::fit
