#include "vocalsep/rpca.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace vocalsep {

namespace {

struct Thresholded {
  Matrix value;
  Eigen::Index rank = 0;
};

Thresholded shrink_singular_values(const Matrix& m, double threshold) {
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > threshold) ++rank;
  Thresholded out;
  out.rank = rank;
  if (rank == 0) {
    out.value = Matrix::Zero(m.rows(), m.cols());
    return out;
  }
  const Eigen::VectorXd shrunk = sigma.head(rank).array() - threshold;
  out.value = svd.matrixU().leftCols(rank) * shrunk.asDiagonal() * svd.matrixV().leftCols(rank).transpose();
  return out;
}

double spectral_norm(const Matrix& m) {
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

}  // namespace

void validate(const RpcaConfig& cfg) {
  require(cfg.lambda > 0, "RPCA lambda must be positive");
  require(cfg.tolerance > 0, "RPCA tolerance must be positive");
  require(cfg.max_iterations >= 1, "RPCA max_iterations must be >= 1");
  require(cfg.mu_growth > 1, "RPCA mu_growth must exceed 1");
  require(cfg.mu_initial_scale > 0 && cfg.mu_cap_scale >= 1, "RPCA mu schedule scalars out of range");
}

double scaled_lambda(double lambda, Eigen::Index rows, Eigen::Index cols) {
  return lambda / std::sqrt(static_cast<double>(std::max(rows, cols)));
}

Matrix svt(const Matrix& m, double threshold) {
  require(threshold >= 0, "svt threshold must be nonnegative");
  return shrink_singular_values(m, threshold).value;
}

Matrix soft_threshold(const Matrix& m, double threshold) {
  require(threshold >= 0, "soft_threshold threshold must be nonnegative");
  return m.unaryExpr([threshold](double v) {
    const double mag = std::abs(v) - threshold;
    return mag > 0 ? std::copysign(mag, v) : 0.0;
  });
}

RpcaResult decompose(const Matrix& x, const RpcaConfig& cfg) {
  validate(cfg);
  require(x.rows() >= 1 && x.cols() >= 1, "RPCA input must be non-empty");
  require(x.allFinite(), "RPCA input has non-finite values");

  RpcaResult result;
  result.lambda_scaled = scaled_lambda(cfg.lambda, x.rows(), x.cols());
  result.eigen_threads = Eigen::nbThreads();

  const double x_fro = x.norm();
  if (x_fro == 0.0) {
    result.low_rank = Matrix::Zero(x.rows(), x.cols());
    result.sparse = Matrix::Zero(x.rows(), x.cols());
    result.converged = true;
    return result;
  }

  const double lambda = result.lambda_scaled;
  const double norm_two = spectral_norm(x);
  const double norm_inf = x.cwiseAbs().maxCoeff() / lambda;
  Matrix y = x / std::max(norm_two, norm_inf);
  Matrix sparse = Matrix::Zero(x.rows(), x.cols());
  Matrix low_rank;

  double mu = cfg.mu_initial_scale / norm_two;
  const double mu_cap = mu * cfg.mu_cap_scale;

  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    const double inv_mu = 1.0 / mu;
    auto thresholded = shrink_singular_values(x - sparse + inv_mu * y, inv_mu);
    low_rank = std::move(thresholded.value);
    sparse = soft_threshold(x - low_rank + inv_mu * y, lambda * inv_mu);

    const Matrix gap = x - low_rank - sparse;
    y += mu * gap;
    mu = std::min(mu * cfg.mu_growth, mu_cap);

    const double residual = gap.norm() / x_fro;
    result.iterations = iter;
    result.final_residual = residual;
    if (cfg.record_trace) {
      const auto nnz = (sparse.array().abs() > 0.0).count();
      result.trace.push_back({iter, residual, thresholded.rank, static_cast<Eigen::Index>(nnz)});
    }
    if (residual < cfg.tolerance) {
      result.converged = true;
      break;
    }
  }

  result.low_rank = std::move(low_rank);
  result.sparse = std::move(sparse);
  return result;
}

}  // namespace vocalsep
