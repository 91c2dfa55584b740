#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "graphflow/flows.hpp"

namespace graphflow {

enum class SolverMethod {
  explicit_euler,
  rk4,
  adams_bashforth2,
  implicit_adams,  // one-step Adams-Moulton (trapezoidal), fixed-point solve
  dopri5,
};

const char* solver_method_name(SolverMethod method) noexcept;
SolverMethod parse_solver_method(const std::string& name);

struct SolverSpec {
  SolverMethod method = SolverMethod::dopri5;
  double step = 0.1;      // fixed-step methods; clamped to t_end when larger
  double rtol = 1e-6;     // dopri5
  double atol = 1e-9;     // dopri5
  int max_fp_iters = 100; // implicit_adams
  double t_end = 1.0;

  void validate() const;
};

/// Invoked at t = 0 and after every accepted step.
using TrajectoryCallback = std::function<void(double, const NodeField&)>;

/// Integrates dZ/dt = op(Z) over [0, t_end] and returns Z(t_end).
/// The implicit method solves Z1 = Z0 + tau/2 (F(Z0) + F(Z1)) by fixed-point
/// iteration, which contracts when tau * Lip(F) < 2.
NodeField integrate(const FlowOperator& op, const NodeField& z0,
                    const SolverSpec& spec,
                    const TrajectoryCallback& callback = {});

/// exp(-t L) z0. Symmetric L goes through the eigendecomposition; general L
/// through scaling-and-squaring, which requires n <= kDenseLimit.
NodeField linear_exact(const Eigen::MatrixXd& l, const NodeField& z0,
                       double t);
NodeField linear_exact(const Graph& g, const NodeField& z0, double t);

/// Collects (t, Z) pairs; write_csv emits one row per accepted step with the
/// flattened state (row-major node-by-channel).
class TrajectoryRecorder {
 public:
  TrajectoryCallback callback();
  const std::vector<double>& times() const { return times_; }
  const std::vector<NodeField>& states() const { return states_; }
  void write_csv(const std::filesystem::path& path) const;

 private:
  std::vector<double> times_;
  std::vector<NodeField> states_;
};

}  // namespace graphflow
