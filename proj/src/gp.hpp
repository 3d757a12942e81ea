#pragma once

#include <Eigen/Dense>

#include "errors.hpp"

namespace mpctune {

// Matern kernel hyperparameters. The lengthscale is interpreted in normalized
// input units (inputs live in the unit box); nu is restricted to the
// half-integer closed forms 1/2, 3/2, 5/2.
struct KernelParams {
  double lengthscale = 1.0;
  double nu = 2.5;
  double noise = 1e-6;  // observation noise variance sigma^2
  void validate() const;
};

// Matern covariance at Euclidean distance `dist` (>= 0). Unit variance at 0.
double matern(double dist, const KernelParams& params);

// Cross-covariance matrix: entry (i,j) = matern(|A_i - B_j|, params).
Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                              const KernelParams& params);

// Exact GP regression with fixed hyperparameters and a zero-mean prior on
// standardized observations. Immutable after fit; posterior queries are
// read-only and thread-safe.
class GpModel {
 public:
  // X: n x d inputs in [0,1]^d, y: n observations. Standardizes y (n >= 2:
  // subtract mean, divide by population std unless ~0; n == 1: kept raw so a
  // single observation still shapes the posterior), factorizes
  // K + (sigma^2 + jitter) I with an escalating jitter schedule.
  static GpModel fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     const KernelParams& params);

  struct Prediction {
    double mean;
    double variance;
  };
  // Posterior mean/variance at a query point (de-standardized scale).
  // Variance includes the observation noise term and is clamped at zero.
  Prediction posterior(const Eigen::VectorXd& xi) const;

  int n() const { return static_cast<int>(x_.rows()); }
  int dim() const { return static_cast<int>(x_.cols()); }
  const KernelParams& params() const { return params_; }
  double y_mean() const { return y_mean_; }
  double y_scale() const { return y_scale_; }
  double jitter() const { return jitter_; }
  const Eigen::MatrixXd& inputs() const { return x_; }
  const Eigen::MatrixXd& chol() const { return chol_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }

 private:
  GpModel() = default;

  Eigen::MatrixXd x_;
  Eigen::VectorXd y_std_;
  KernelParams params_;
  Eigen::MatrixXd chol_;   // lower-triangular factor of K + (sigma^2 + jitter) I
  Eigen::VectorXd alpha_;  // (K + sigma^2 I)^-1 y, standardized scale
  double y_mean_ = 0.0;
  double y_scale_ = 1.0;
  double jitter_ = 0.0;
};

}  // namespace mpctune
