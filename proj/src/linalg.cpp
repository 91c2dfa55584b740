#include "graphflow/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "graphflow/rng.hpp"

namespace graphflow {

double sigma_max_power(const Eigen::MatrixXd& m, int iters, double tol) {
  if (m.size() == 0 || m.norm() == 0.0) {
    fail(errc::zero_matrix, "sigma_max_power: zero matrix");
  }
  auto rng = make_rng(0x5eed5eedULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd v(m.cols());
  for (int i = 0; i < v.size(); ++i) v(i) = gauss(rng);
  v.normalize();

  double rayleigh = 0.0;
  for (int k = 0; k < iters; ++k) {
    const Eigen::VectorXd w = m.transpose() * (m * v);
    rayleigh = v.dot(w);
    // for symmetric M^T M the Rayleigh quotient is within the residual of
    // an eigenvalue, so this bounds the relative error directly
    if ((w - rayleigh * v).norm() <= tol * std::abs(rayleigh)) break;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;  // landed in the kernel exactly
    v = w / norm;
  }
  return std::sqrt(std::max(rayleigh, 0.0));
}

const char* matrix_norm_name(MatrixNorm norm) noexcept {
  switch (norm) {
    case MatrixNorm::op2: return "op2";
    case MatrixNorm::frobenius: return "frobenius";
    case MatrixNorm::max_row_sum: return "max_row_sum";
  }
  return "op2";
}

MatrixNorm parse_matrix_norm(const std::string& name) {
  if (name == "op2") return MatrixNorm::op2;
  if (name == "frobenius" || name == "fro") return MatrixNorm::frobenius;
  if (name == "max_row_sum" || name == "inf") return MatrixNorm::max_row_sum;
  fail(errc::config_error, "unknown matrix norm '" + name + "'");
}

double matrix_norm(const Eigen::MatrixXd& m, MatrixNorm norm) {
  switch (norm) {
    case MatrixNorm::op2:
      if (m.norm() == 0.0) return 0.0;
      return sigma_max_power(m);
    case MatrixNorm::frobenius:
      return m.norm();
    case MatrixNorm::max_row_sum:
      return m.cwiseAbs().rowwise().sum().maxCoeff();
  }
  return 0.0;
}

namespace {

// Pade 13 coefficients (Higham 2005).
constexpr double kPade13[] = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0,  129060195264000.0,   10559470521600.0,
    670442572800.0,      33522128640.0,       1323241920.0,
    40840800.0,          960960.0,            16380.0,
    182.0,               1.0};
constexpr double kTheta13 = 5.371920351148152;

}  // namespace

Eigen::MatrixXd expm(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) fail(errc::dimension_mismatch, "expm: not square");
  if (a.rows() > kDenseLimit) {
    fail(errc::non_symmetric_too_large,
         "expm: n = " + std::to_string(a.rows()) + " > " +
             std::to_string(kDenseLimit));
  }
  const int n = static_cast<int>(a.rows());
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();  // 1-norm
  int squarings = 0;
  if (norm > kTheta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / kTheta13)));
  }
  const Eigen::MatrixXd scaled = a / std::pow(2.0, squarings);

  const Eigen::MatrixXd ident = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd a2 = scaled * scaled;
  const Eigen::MatrixXd a4 = a2 * a2;
  const Eigen::MatrixXd a6 = a2 * a4;
  const auto& b = kPade13;

  Eigen::MatrixXd u =
      scaled * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 +
                b[5] * a4 + b[3] * a2 + b[1] * ident);
  Eigen::MatrixXd v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 +
                      b[4] * a4 + b[2] * a2 + b[0] * ident;

  Eigen::MatrixXd numer = v + u;
  Eigen::MatrixXd denom = v - u;
  Eigen::MatrixXd result = denom.partialPivLu().solve(numer);
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) {
    fail(errc::eigen_failure, "symmetric eigendecomposition failed");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Eigen::MatrixXd exp_symmetric_apply(const SymmetricEigen& eig, double t,
                                    const Eigen::MatrixXd& z) {
  const Eigen::ArrayXd decay = (-t * eig.values.array()).exp();
  return eig.vectors *
         (decay.matrix().asDiagonal() * (eig.vectors.transpose() * z));
}

Eigen::MatrixXd exp_symmetric_apply(const Eigen::MatrixXd& l, double t,
                                    const Eigen::MatrixXd& z) {
  return exp_symmetric_apply(symmetric_eigen(l), t, z);
}

LinearFit fit_linear(const std::vector<double>& x,
                     const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    fail(errc::dimension_mismatch, "fit_linear: need matching points, >= 2");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LinearFit fit;
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  const double mean_y = sy / n;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double predicted = fit.slope * x[i] + fit.intercept;
    ss_res += (y[i] - predicted) * (y[i] - predicted);
    ss_tot += (y[i] - mean_y) * (y[i] - mean_y);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

double max_real_eigenvalue(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) {
    fail(errc::dimension_mismatch, "max_real_eigenvalue: not square");
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    fail(errc::eigen_failure, "eigenvalue computation failed");
  }
  return solver.eigenvalues().real().maxCoeff();
}

}  // namespace graphflow
