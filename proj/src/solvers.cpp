#include "graphflow/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "graphflow/linalg.hpp"

namespace graphflow {

const char* solver_method_name(SolverMethod method) noexcept {
  switch (method) {
    case SolverMethod::explicit_euler: return "explicit_euler";
    case SolverMethod::rk4: return "rk4";
    case SolverMethod::adams_bashforth2: return "adams_bashforth2";
    case SolverMethod::implicit_adams: return "implicit_adams";
    case SolverMethod::dopri5: return "dopri5";
  }
  return "dopri5";
}

SolverMethod parse_solver_method(const std::string& name) {
  if (name == "explicit_euler" || name == "euler")
    return SolverMethod::explicit_euler;
  if (name == "rk4") return SolverMethod::rk4;
  if (name == "adams_bashforth2" || name == "explicit_adams" || name == "ab2")
    return SolverMethod::adams_bashforth2;
  if (name == "implicit_adams" || name == "trapezoidal")
    return SolverMethod::implicit_adams;
  if (name == "dopri5") return SolverMethod::dopri5;
  fail(errc::config_error, "unknown solver method '" + name + "'");
}

void SolverSpec::validate() const {
  if (!(step > 0.0)) fail(errc::config_error, "solver step must be > 0");
  if (!(rtol > 0.0) || !(atol > 0.0)) {
    fail(errc::config_error, "solver tolerances must be > 0");
  }
  if (!(t_end >= 0.0)) fail(errc::config_error, "t_end must be >= 0");
  if (max_fp_iters <= 0) fail(errc::config_error, "max_fp_iters must be > 0");
}

namespace {

void check_finite(const NodeField& z, double t) {
  if (!z.allFinite()) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "state non-finite at t=%.6g", t);
    fail(errc::non_finite_state, buf);
  }
}

double clamped_step(const SolverSpec& spec) {
  if (spec.step > spec.t_end) {
    char buf[96];
    std::snprintf(buf, sizeof(buf),
                  "step %.3g exceeds horizon %.3g; clamping to a single step",
                  spec.step, spec.t_end);
    log_warn(buf);
    return spec.t_end;
  }
  return spec.step;
}

using Rhs = std::function<NodeField(double, const NodeField&)>;

NodeField fixed_step_loop(const Rhs& f, const NodeField& z0,
                          const SolverSpec& spec,
                          const TrajectoryCallback& callback) {
  const double tau = clamped_step(spec);
  NodeField z = z0;
  double t = 0.0;
  NodeField prev_rhs;  // adams_bashforth2 history
  bool have_prev = false;

  while (t < spec.t_end - 1e-14) {
    const double h = std::min(tau, spec.t_end - t);
    switch (spec.method) {
      case SolverMethod::explicit_euler: {
        z = z + h * f(t, z);
        break;
      }
      case SolverMethod::rk4: {
        const NodeField k1 = f(t, z);
        const NodeField k2 = f(t + 0.5 * h, z + 0.5 * h * k1);
        const NodeField k3 = f(t + 0.5 * h, z + 0.5 * h * k2);
        const NodeField k4 = f(t + h, z + h * k3);
        z = z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        break;
      }
      case SolverMethod::adams_bashforth2: {
        const NodeField fk = f(t, z);
        if (!have_prev || h != tau) {
          // starter / shortened final step: Heun
          const NodeField pred = z + h * fk;
          z = z + 0.5 * h * (fk + f(t + h, pred));
        } else {
          z = z + h * (1.5 * fk - 0.5 * prev_rhs);
        }
        prev_rhs = fk;
        have_prev = true;
        break;
      }
      case SolverMethod::implicit_adams: {
        const NodeField fk = f(t, z);
        NodeField y = z + h * fk;  // Euler predictor
        double last_change = std::numeric_limits<double>::infinity();
        bool converged = false;
        for (int it = 0; it < spec.max_fp_iters; ++it) {
          const NodeField next = z + 0.5 * h * (fk + f(t + h, y));
          const double change = (next - y).cwiseAbs().maxCoeff();
          y = next;
          const double tol =
              1e-10 * (1.0 + y.cwiseAbs().maxCoeff());
          if (change <= tol) {
            converged = true;
            break;
          }
          last_change = change;
        }
        if (!converged) {
          char buf[128];
          std::snprintf(buf, sizeof(buf),
                        "implicit step at t=%.6g did not contract "
                        "(last change %.3g); tau*Lip < 2 required",
                        t, last_change);
          fail(errc::fixed_point_divergence, buf);
        }
        z = y;
        break;
      }
      default:
        fail(errc::config_error, "fixed_step_loop: adaptive method");
    }
    t += h;
    check_finite(z, t);
    if (callback) callback(t, z);
  }
  return z;
}

// Dormand-Prince 5(4) tableau.
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187,
                 kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33,
                 kA63 = 46732.0 / 5247, kA64 = 49.0 / 176,
                 kA65 = -5103.0 / 18656;
constexpr double kA71 = 35.0 / 384, kA73 = 500.0 / 1113, kA74 = 125.0 / 192,
                 kA75 = -2187.0 / 6784, kA76 = 11.0 / 84;
constexpr double kC2 = 1.0 / 5, kC3 = 3.0 / 10, kC4 = 4.0 / 5, kC5 = 8.0 / 9;
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 10.0;
constexpr double kBeta = 0.04;
constexpr double kMinStep = 1e-12;

NodeField dopri5_loop(const Rhs& f, const NodeField& z0,
                      const SolverSpec& spec,
                      const TrajectoryCallback& callback) {
  const double t_end = spec.t_end;
  NodeField z = z0;
  double t = 0.0;
  NodeField k1 = f(t, z);

  auto error_norm = [&](const NodeField& err, const NodeField& a,
                        const NodeField& b) {
    const Eigen::ArrayXXd scale =
        spec.atol +
        spec.rtol * a.array().abs().max(b.array().abs());
    return std::sqrt((err.array() / scale).square().mean());
  };

  // initial step: crude but scale-aware
  double h = [&] {
    const double d0 = z.norm();
    const double d1 = k1.norm();
    double guess = (d0 > 1e-10 && d1 > 1e-10) ? 0.01 * d0 / d1 : 1e-4 * t_end;
    return std::min(std::max(guess, kMinStep), t_end);
  }();

  double err_old = 1e-4;
  while (t < t_end - 1e-14) {
    h = std::min(h, t_end - t);
    if (h < kMinStep) {
      fail(errc::step_underflow, "adaptive step fell below 1e-12");
    }
    const NodeField k2 = f(t + kC2 * h, z + h * (kA21 * k1));
    const NodeField k3 = f(t + kC3 * h, z + h * (kA31 * k1 + kA32 * k2));
    const NodeField k4 =
        f(t + kC4 * h, z + h * (kA41 * k1 + kA42 * k2 + kA43 * k3));
    const NodeField k5 = f(
        t + kC5 * h, z + h * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4));
    const NodeField k6 =
        f(t + h,
          z + h * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5));
    const NodeField z_new =
        z + h * (kA71 * k1 + kA73 * k3 + kA74 * k4 + kA75 * k5 + kA76 * k6);
    const NodeField k7 = f(t + h, z_new);

    const NodeField err_vec =
        h * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);
    const double err = error_norm(err_vec, z, z_new);

    if (err <= 1.0) {
      t += h;
      z = z_new;
      k1 = k7;  // FSAL
      check_finite(z, t);
      if (callback) callback(t, z);
      // PI controller
      const double exponent = 0.2 - kBeta * 0.75;
      double factor = kSafety * std::pow(std::max(err, 1e-10), -exponent) *
                      std::pow(err_old, kBeta);
      factor = std::clamp(factor, kMinFactor, kMaxFactor);
      h *= factor;
      err_old = std::max(err, 1e-10);
    } else {
      const double factor =
          std::clamp(kSafety * std::pow(err, -0.2), kMinFactor, 1.0);
      h *= factor;
    }
  }
  return z;
}

}  // namespace

NodeField integrate(const FlowOperator& op, const NodeField& z0,
                    const SolverSpec& spec, const TrajectoryCallback& callback) {
  spec.validate();
  check_finite(z0, 0.0);
  op.prepare(z0);
  if (callback) callback(0.0, z0);
  if (spec.t_end == 0.0) return z0;

  const Rhs f = [&op](double t, const NodeField& z) {
    return op.evaluate(t, z);
  };
  if (spec.method == SolverMethod::dopri5) {
    return dopri5_loop(f, z0, spec, callback);
  }
  return fixed_step_loop(f, z0, spec, callback);
}

NodeField linear_exact(const Eigen::MatrixXd& l, const NodeField& z0,
                       double t) {
  if (l.rows() != l.cols()) {
    fail(errc::dimension_mismatch, "linear_exact: matrix not square");
  }
  if (l.rows() != z0.rows()) {
    fail(errc::dimension_mismatch, "linear_exact: state/matrix size mismatch");
  }
  if (t == 0.0) return z0;
  const double asym = (l - l.transpose()).cwiseAbs().maxCoeff();
  if (asym <= 1e-12) {
    return exp_symmetric_apply(l, t, z0);
  }
  if (l.rows() > kDenseLimit) {
    fail(errc::non_symmetric_too_large,
         "linear_exact: non-symmetric matrix larger than the dense limit");
  }
  return expm(-t * l) * z0;
}

NodeField linear_exact(const Graph& g, const NodeField& z0, double t) {
  return linear_exact(normalized_laplacian_dense(g), z0, t);
}

TrajectoryCallback TrajectoryRecorder::callback() {
  return [this](double t, const NodeField& z) {
    times_.push_back(t);
    states_.push_back(z);
  };
}

void TrajectoryRecorder::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) fail(errc::io_error, "cannot write " + path.string());
  out << "t";
  if (!states_.empty()) {
    for (int v = 0; v < states_.front().rows(); ++v) {
      for (int c = 0; c < states_.front().cols(); ++c) {
        out << ",z" << v << "_" << c;
      }
    }
  }
  out << "\n";
  char buf[32];
  for (std::size_t i = 0; i < times_.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", times_[i]);
    out << buf;
    const auto& z = states_[i];
    for (int v = 0; v < z.rows(); ++v) {
      for (int c = 0; c < z.cols(); ++c) {
        std::snprintf(buf, sizeof(buf), "%.17g", z(v, c));
        out << "," << buf;
      }
    }
    out << "\n";
  }
}

}  // namespace graphflow
