#pragma once

#include <stdexcept>
#include <string>

namespace graphflow {

// Matrices up to this order are handled densely (eigendecompositions,
// matrix exponentials); larger problems stay on the sparse path.
inline constexpr int kDenseLimit = 2048;

enum class errc {
  non_positive_weight,
  self_loop,
  duplicate_edge,
  index_out_of_range,
  zero_degree_node,
  missing_orientation,
  dimension_mismatch,
  zero_matrix,
  missing_attention_params,
  non_finite_state,
  fixed_point_divergence,
  step_underflow,
  non_symmetric_too_large,
  cannot_reach_target_norm,
  degree_collapse,
  eigen_failure,
  empty_graph,
  budget_exceeds_graph,
  connectivity_unrepairable,
  singular_system,
  disconnected_after_retries,
  config_error,
  io_error,
};

const char* errc_name(errc code) noexcept;

/// Library error carrying a machine-readable code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) {
  throw Error(code, what);
}

// Logging to stderr, level selected by GRAPHFLOW_LOG in
// {error, warn, info, debug}; default warn.
enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

LogLevel log_level();
void log_message(LogLevel level, const std::string& msg);

inline void log_warn(const std::string& msg) { log_message(LogLevel::warn, msg); }
inline void log_info(const std::string& msg) { log_message(LogLevel::info, msg); }
inline void log_debug(const std::string& msg) { log_message(LogLevel::debug, msg); }

}  // namespace graphflow
