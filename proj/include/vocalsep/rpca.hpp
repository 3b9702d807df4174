#pragma once

#include "vocalsep/common.hpp"

#include <cstddef>
#include <vector>

namespace vocalsep {

struct RpcaConfig {
  double lambda = 0.8;            // scaled by 1/sqrt(max(T, F)) inside decompose()
  double tolerance = 1e-7;        // on ||X - L - S||_F / ||X||_F
  int max_iterations = 1000;
  double mu_initial_scale = 1.25; // mu_0 = scale / ||X||_2
  double mu_growth = 1.5;         // rho
  double mu_cap_scale = 1e7;      // mu never exceeds mu_0 * mu_cap_scale
  bool record_trace = false;
};

void validate(const RpcaConfig& cfg);

struct RpcaTraceEntry {
  int iteration = 0;
  double residual = 0.0;
  Eigen::Index rank = 0;
  Eigen::Index nonzeros = 0;
};

struct RpcaResult {
  Matrix low_rank;
  Matrix sparse;
  int iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
  double lambda_scaled = 0.0;
  int eigen_threads = 1;  // thread configuration the SVD ran with
  std::vector<RpcaTraceEntry> trace;
};

/// lambda / sqrt(max(rows, cols)).
double scaled_lambda(double lambda, Eigen::Index rows, Eigen::Index cols);

/// Robust PCA by inexact augmented Lagrange multipliers:
/// minimise ||L||_* + lambda_hat ||S||_1 subject to L + S = X.
/// Non-convergence is reported through RpcaResult::converged, not thrown.
RpcaResult decompose(const Matrix& x, const RpcaConfig& cfg);

/// Singular value thresholding: U max(Sigma - threshold, 0) V^T.
Matrix svt(const Matrix& m, double threshold);

/// Elementwise sign(v) max(|v| - threshold, 0).
Matrix soft_threshold(const Matrix& m, double threshold);

}  // namespace vocalsep
