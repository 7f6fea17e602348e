#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace invsfm {

struct SolverOptions {
  int max_iterations = 200;
  double initial_damping = 1e-3;
  double damping_increase = 10.0;
  double damping_decrease = 10.0;
  double max_damping = 1e12;
  double gradient_tolerance = 1e-10;  // on |J^T r|_inf
  double step_tolerance = 1e-12;      // relative to |x| + step_tolerance
  double fd_relative_step = 1e-7;     // h_j = fd_relative_step * max(1, |x_j|)
  int multistart = 1;
  std::uint64_t seed = 0;
  // Initialization, in gauge units. Start 0 uses the two-view estimate when
  // two_view_start is set and n >= 8; every other start uses the ray
  // initialization.
  bool two_view_start = true;
  double initial_depth = 2.0;
  double camera_perturbation = 0.1;
};

// Residual function; std::nullopt marks a point where the residual cannot be
// evaluated (a trial step there is rejected).
using ResidualFn = std::function<std::optional<Eigen::VectorXd>(const Eigen::VectorXd&)>;

enum class Termination {
  kGradient,
  kStep,
  kZeroCost,
  kMaxIterations,
  kDampingOverflow,
};

std::string_view to_string(Termination t);

struct LmDiagnostics {
  int iterations = 0;        // accepted steps
  int evaluations = 0;       // residual evaluations, Jacobians included
  Termination termination = Termination::kMaxIterations;
  bool converged = false;    // gradient, step or zero-cost termination
  std::vector<double> cost_trace;  // 0.5 |r|^2 at x0 and after every accepted step
  double final_damping = 0.0;
};

struct LmResult {
  Eigen::VectorXd x;
  Eigen::VectorXd residuals;
  LmDiagnostics diagnostics;
};

// Levenberg-Marquardt with forward-difference Jacobians and Marquardt's
// diagonal scaling (J^T J + mu diag(J^T J)) delta = -J^T r.
//
// Throws kNonFiniteResidual when the residual at x0 is missing or not
// finite, and kEvaluationError when a Jacobian column cannot be formed.
// Damping beyond max_damping ends the run with kDampingOverflow and the best
// iterate; it is not an exception.
LmResult levenberg_marquardt(const ResidualFn& residual_fn, const Eigen::VectorXd& x0,
                             const SolverOptions& opts);

// Forward-difference Jacobian at x with residual r = residual_fn(x).
Eigen::MatrixXd finite_difference_jacobian(const ResidualFn& residual_fn,
                                           const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& r,
                                           double relative_step, int* evaluations = nullptr);

}  // namespace invsfm
