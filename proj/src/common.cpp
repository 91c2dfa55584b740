#include "graphflow/common.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <mutex>

namespace graphflow {

const char* errc_name(errc code) noexcept {
  switch (code) {
    case errc::non_positive_weight: return "NonPositiveWeight";
    case errc::self_loop: return "SelfLoop";
    case errc::duplicate_edge: return "DuplicateEdge";
    case errc::index_out_of_range: return "IndexOutOfRange";
    case errc::zero_degree_node: return "ZeroDegreeNode";
    case errc::missing_orientation: return "MissingOrientation";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::zero_matrix: return "ZeroMatrix";
    case errc::missing_attention_params: return "MissingAttentionParams";
    case errc::non_finite_state: return "NonFiniteState";
    case errc::fixed_point_divergence: return "FixedPointDivergence";
    case errc::step_underflow: return "StepUnderflow";
    case errc::non_symmetric_too_large: return "NonSymmetricTooLarge";
    case errc::cannot_reach_target_norm: return "CannotReachTargetNorm";
    case errc::degree_collapse: return "DegreeCollapse";
    case errc::eigen_failure: return "EigenFailure";
    case errc::empty_graph: return "EmptyGraph";
    case errc::budget_exceeds_graph: return "BudgetExceedsGraph";
    case errc::connectivity_unrepairable: return "ConnectivityUnrepairable";
    case errc::singular_system: return "SingularSystem";
    case errc::disconnected_after_retries: return "DisconnectedAfterRetries";
    case errc::config_error: return "ConfigError";
    case errc::io_error: return "IoError";
  }
  return "UnknownError";
}

LogLevel log_level() {
  static LogLevel level = [] {
    const char* env = std::getenv("GRAPHFLOW_LOG");
    if (env == nullptr) return LogLevel::warn;
    if (std::strcmp(env, "error") == 0) return LogLevel::error;
    if (std::strcmp(env, "warn") == 0) return LogLevel::warn;
    if (std::strcmp(env, "info") == 0) return LogLevel::info;
    if (std::strcmp(env, "debug") == 0) return LogLevel::debug;
    return LogLevel::warn;
  }();
  return level;
}

void log_message(LogLevel level, const std::string& msg) {
  if (level > log_level()) return;
  static std::mutex mu;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::lock_guard<std::mutex> lock(mu);
  std::fprintf(stderr, "[graphflow:%s] %s\n", names[static_cast<int>(level)],
               msg.c_str());
}

}  // namespace graphflow
