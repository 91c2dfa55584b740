#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "graphflow/attention.hpp"
#include "graphflow/flows.hpp"
#include "graphflow/graph.hpp"
#include "graphflow/linalg.hpp"

namespace graphflow {

enum class PerturbMode { add, remove, mixed };

const char* perturb_mode_name(PerturbMode mode) noexcept;
PerturbMode parse_perturb_mode(const std::string& name);

struct PerturbationSweep {
  std::vector<double> epsilons;  // positive, ascending
  MatrixNorm norm = MatrixNorm::op2;
  int trials = 10;
  std::uint64_t seed = 0;
  PerturbMode mode = PerturbMode::mixed;

  void validate() const;
};

struct StabilityReport {
  std::vector<double> epsilons;
  std::vector<double> gap_mean;
  std::vector<double> gap_sigma;
  double slope = 0.0;      // log gap vs log epsilon
  double intercept = 0.0;
  double r_squared = 0.0;
  double rho_hat = 0.0;    // spectral gap of the clean Laplacian
  double eig_min = 0.0;
  double eig_max = 0.0;
  MatrixNorm norm = MatrixNorm::op2;
  PerturbMode mode = PerturbMode::mixed;
  int trials = 0;
  std::uint64_t seed = 0;
  double t = 1.0;

  std::string to_json_string(int indent = 2) const;
  void write_json(const std::filesystem::path& path) const;
  void write_gaps_csv(const std::filesystem::path& path) const;
};

/// Returns a graph whose adjacency differs from g by a symmetric E with
/// |||E||| = epsilon (within 2%) under the selected norm. The entry pattern
/// and relative magnitudes depend only on the seed, so the same seed at
/// 2*epsilon yields exactly 2E. Weights stay positive; degrees stay positive.
Graph perturb_adjacency(const Graph& g, double epsilon, PerturbMode mode,
                        std::uint64_t seed,
                        MatrixNorm norm = MatrixNorm::op2);

/// || exp(-t L) z0 - exp(-t L~) z0 ||_F through the eigendecomposition path.
double semigroup_gap(const Graph& g, const Graph& g_tilde, const NodeField& z0,
                     double t);

/// Same, with each operator's kernel direction (D^{1/2} 1) projected out of
/// its own trajectory; isolates the decaying part of the gap.
double semigroup_gap_deflated(const Graph& g, const Graph& g_tilde,
                              const NodeField& z0, double t);

/// Sweeps epsilon, measures semigroup gaps against the dense-exponential
/// oracle and fits the log-log slope. Trial seeds are shared across epsilons
/// so every epsilon sees the same perturbation directions.
StabilityReport stability_slope(const Graph& g, const PerturbationSweep& sweep,
                                double t);
StabilityReport stability_slope(const Graph& g, const PerturbationSweep& sweep,
                                double t, const NodeField& z0);

/// Piecewise-constant schedule segment: clean and perturbed generators held
/// for `duration`.
struct Segment {
  double duration = 1.0;
  Graph clean;
  Graph perturbed;
};

/// Propagates z0 through the product of segment exponentials on both sides
/// and returns the terminal Frobenius gap.
double time_variant_gap(const std::vector<Segment>& schedule,
                        const NodeField& z0);

struct LyapunovRecord {
  FlowKind kind = FlowKind::attention_heat;
  int n = 0;
  double max_real_part = 0.0;
  bool stable = false;  // max real part <= 1e-8
};

/// Largest real eigenvalue part of the flow's coefficient matrix
/// (A - I, or A.B - Psi).
LyapunovRecord lyapunov_check(const Graph& g, const NodeField& z,
                              const AttentionParams& params, FlowKind kind,
                              double delta = 1e-6);

}  // namespace graphflow
