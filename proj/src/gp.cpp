#include "gp.hpp"

#include <cmath>
#include <sstream>

namespace mpctune {

namespace {
constexpr double kJitterStart = 1e-10;
constexpr double kJitterMax = 1e-4;

bool is_supported_nu(double nu) { return nu == 0.5 || nu == 1.5 || nu == 2.5; }
}  // namespace

void KernelParams::validate() const {
  if (!(lengthscale > 0.0)) throw ConfigError("kernel lengthscale must be > 0");
  if (!(noise >= 0.0)) throw ConfigError("kernel noise variance must be >= 0");
  if (!is_supported_nu(nu)) {
    std::ostringstream os;
    os << "unsupported Matern smoothness nu=" << nu << " (supported: 0.5, 1.5, 2.5)";
    throw ConfigError(os.str());
  }
}

double matern(double dist, const KernelParams& params) {
  params.validate();
  if (!(dist >= 0.0)) throw InputError("matern: distance must be >= 0");
  const double r = dist / params.lengthscale;
  if (params.nu == 0.5) {
    return std::exp(-r);
  }
  if (params.nu == 1.5) {
    const double s = std::numbers::sqrt3 * r;
    return (1.0 + s) * std::exp(-s);
  }
  const double s = std::sqrt(5.0) * r;
  return (1.0 + s + s * s / 3.0) * std::exp(-s);
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                              const KernelParams& params) {
  params.validate();
  if (a.rows() == 0 || b.rows() == 0) throw InputError("kernel_matrix: empty input");
  if (a.cols() != b.cols()) throw InputError("kernel_matrix: dimension mismatch");
  Eigen::MatrixXd k(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      k(i, j) = matern((a.row(i) - b.row(j)).norm(), params);
    }
  }
  return k;
}

GpModel GpModel::fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     const KernelParams& params) {
  params.validate();
  const Eigen::Index n = x.rows();
  if (n < 1) throw InputError("GpModel::fit: need at least one observation");
  if (y.size() != n) throw InputError("GpModel::fit: X/y size mismatch");
  if (!y.allFinite()) throw InputError("GpModel::fit: non-finite observations");

  GpModel m;
  m.x_ = x;
  m.params_ = params;

  if (n == 1) {
    m.y_mean_ = 0.0;
    m.y_scale_ = 1.0;
  } else {
    m.y_mean_ = y.mean();
    const double var = (y.array() - m.y_mean_).square().mean();
    const double sd = std::sqrt(var);
    m.y_scale_ = sd > 1e-12 ? sd : 1.0;
  }
  m.y_std_ = (y.array() - m.y_mean_) / m.y_scale_;

  const Eigen::MatrixXd k = kernel_matrix(x, x, params);
  double jitter = 0.0;
  while (true) {
    Eigen::MatrixXd kn = k;
    kn.diagonal().array() += params.noise + jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(kn);
    if (llt.info() == Eigen::Success) {
      m.chol_ = llt.matrixL();
      m.alpha_ = llt.solve(m.y_std_);
      m.jitter_ = jitter;
      return m;
    }
    if (jitter == 0.0) {
      jitter = kJitterStart;
    } else if (jitter * 10.0 <= kJitterMax) {
      jitter *= 10.0;
    } else {
      std::ostringstream os;
      os << "GP covariance factorization failed (n=" << n << ", noise=" << params.noise
         << ", jitter up to " << kJitterMax << " on standardized scale)";
      throw NumericalError(os.str());
    }
  }
}

GpModel::Prediction GpModel::posterior(const Eigen::VectorXd& xi) const {
  if (xi.size() != dim()) throw InputError("GpModel::posterior: query dimension mismatch");
  Eigen::VectorXd kvec(n());
  for (int i = 0; i < n(); ++i) {
    kvec(i) = matern((x_.row(i).transpose() - xi).norm(), params_);
  }
  const double mean_std = kvec.dot(alpha_);
  const Eigen::VectorXd v = chol_.triangularView<Eigen::Lower>().solve(kvec);
  double var_std = 1.0 + params_.noise - v.squaredNorm();  // k(xi,xi) = 1
  if (var_std < 0.0) var_std = 0.0;
  return {y_mean_ + y_scale_ * mean_std, y_scale_ * y_scale_ * var_std};
}

}  // namespace mpctune
