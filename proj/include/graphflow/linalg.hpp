#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "graphflow/common.hpp"

namespace graphflow {

/// Largest singular value, estimated by power iteration on M^T M.
/// Deterministic (fixed internal start vector). Stops after `iters` rounds or
/// when the relative change of the estimate drops below `tol`.
double sigma_max_power(const Eigen::MatrixXd& m, int iters = 200,
                       double tol = 1e-9);

enum class MatrixNorm { op2, frobenius, max_row_sum };

const char* matrix_norm_name(MatrixNorm norm) noexcept;
MatrixNorm parse_matrix_norm(const std::string& name);

double matrix_norm(const Eigen::MatrixXd& m, MatrixNorm norm);

/// Matrix exponential via Pade order 13 with scaling and squaring.
Eigen::MatrixXd expm(const Eigen::MatrixXd& a);

struct SymmetricEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns
};

SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& m);

/// exp(-t L) z for symmetric L, through the eigendecomposition of L.
Eigen::MatrixXd exp_symmetric_apply(const Eigen::MatrixXd& l, double t,
                                    const Eigen::MatrixXd& z);
Eigen::MatrixXd exp_symmetric_apply(const SymmetricEigen& eig, double t,
                                    const Eigen::MatrixXd& z);

/// Largest real part over the (generally complex) spectrum of a square
/// matrix.
double max_real_eigenvalue(const Eigen::MatrixXd& m);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least-squares line through (x, y).
LinearFit fit_linear(const std::vector<double>& x,
                     const std::vector<double>& y);

}  // namespace graphflow
