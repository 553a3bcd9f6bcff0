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

// Small regression routines used by the curve-fitting metrics.

#ifndef CALMET_FIT_H_
#define CALMET_FIT_H_

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace calmet::fit {

struct LogisticFit {
  Eigen::VectorXd coef;
  // Inverse observed Fisher information at the optimum.
  Eigen::MatrixXd cov;
  int iterations = 0;
  bool converged = false;
};

// Maximum-likelihood logistic regression by iteratively reweighted least
// squares. `weights` (optional) are per-row case weights; `ridge` adds an
// L2 penalty on all but the first coefficient.
LogisticFit logistic_irls(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          double ridge = 0.0, int max_iter = 100,
                          double tol = 1e-8);

struct LinearFit {
  Eigen::VectorXd coef;
  Eigen::VectorXd residuals;
  Eigen::MatrixXd xtx_inv;
  int rank = 0;
};

// Ordinary least squares through a column-pivoting QR.
LinearFit least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

// Local-linear regression with an Epanechnikov kernel evaluated at `at`.
// Falls back to the nearest observation when no point falls in the window.
double local_linear_epanechnikov(std::span<const double> xs,
                                 std::span<const double> ys, double at,
                                 double bandwidth);

// LOESS smoother (tri-cube weights, local polynomial of `degree`) evaluated
// at every input abscissa. `span` is the fraction of points per local fit.
std::vector<double> loess(std::span<const double> xs, std::span<const double> ys,
                          double span = 0.75, int degree = 2);

// Restricted (natural) cubic spline basis: a linear term followed by
// knots.size() - 2 truncated-cubic terms, linear beyond the boundary knots.
Eigen::MatrixXd natural_spline_basis(std::span<const double> x,
                                     std::span<const double> knots);

}  // namespace calmet::fit

#endif  // CALMET_FIT_H_
