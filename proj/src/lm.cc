#include "invsfm/lm.h"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "invsfm/errors.h"

namespace invsfm {

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::kGradient: return "gradient";
    case Termination::kStep: return "step";
    case Termination::kZeroCost: return "zero_cost";
    case Termination::kMaxIterations: return "max_iterations";
    case Termination::kDampingOverflow: return "damping_overflow";
  }
  return "unknown";
}

namespace {

std::optional<Eigen::VectorXd> evaluate(const ResidualFn& fn, const Eigen::VectorXd& x,
                                        int* evaluations) {
  if (evaluations) ++*evaluations;
  auto r = fn(x);
  if (!r || !r->allFinite()) return std::nullopt;
  return r;
}

}  // namespace

Eigen::MatrixXd finite_difference_jacobian(const ResidualFn& residual_fn,
                                           const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& r,
                                           double relative_step, int* evaluations) {
  Eigen::MatrixXd jac(r.size(), x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = relative_step * std::max(1.0, std::abs(x(j)));
    xp(j) = x(j) + h;
    auto rp = evaluate(residual_fn, xp, evaluations);
    if (rp && rp->size() == r.size()) {
      jac.col(j) = (*rp - r) / h;
    } else {
      xp(j) = x(j) - h;
      auto rm = evaluate(residual_fn, xp, evaluations);
      if (!rm || rm->size() != r.size()) {
        throw Error(ErrorCode::kEvaluationError,
                    "residual not evaluable on either side of coordinate " + std::to_string(j));
      }
      jac.col(j) = (r - *rm) / h;
    }
    xp(j) = x(j);
  }
  return jac;
}

LmResult levenberg_marquardt(const ResidualFn& residual_fn, const Eigen::VectorXd& x0,
                             const SolverOptions& opts) {
  LmResult out;
  LmDiagnostics& diag = out.diagnostics;

  auto r0 = evaluate(residual_fn, x0, &diag.evaluations);
  if (!r0) {
    throw Error(ErrorCode::kNonFiniteResidual, "residual at the starting point is not finite");
  }
  Eigen::VectorXd x = x0;
  Eigen::VectorXd r = *r0;
  double cost = 0.5 * r.squaredNorm();
  diag.cost_trace.push_back(cost);
  double mu = opts.initial_damping;

  auto finish = [&](Termination t) {
    diag.termination = t;
    diag.converged = t == Termination::kGradient || t == Termination::kStep ||
                     t == Termination::kZeroCost;
    diag.final_damping = mu;
    out.x = x;
    out.residuals = r;
    return out;
  };

  if (cost == 0.0) return finish(Termination::kZeroCost);

  while (diag.iterations < opts.max_iterations) {
    const Eigen::MatrixXd jac =
        finite_difference_jacobian(residual_fn, x, r, opts.fd_relative_step, &diag.evaluations);
    const Eigen::VectorXd grad = jac.transpose() * r;
    if (grad.lpNorm<Eigen::Infinity>() <= opts.gradient_tolerance) {
      return finish(Termination::kGradient);
    }
    const Eigen::MatrixXd normal = jac.transpose() * jac;

    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd damped = normal;
      for (Eigen::Index k = 0; k < damped.rows(); ++k) {
        const double d = normal(k, k);
        damped(k, k) = d > 0.0 ? d * (1.0 + mu) : mu;
      }
      Eigen::VectorXd step = damped.ldlt().solve(-grad);
      if (!step.allFinite()) step = damped.colPivHouseholderQr().solve(-grad);

      if (step.allFinite() &&
          step.norm() <= opts.step_tolerance * (x.norm() + opts.step_tolerance)) {
        return finish(Termination::kStep);
      }

      if (step.allFinite()) {
        const Eigen::VectorXd trial = x + step;
        auto rt = evaluate(residual_fn, trial, &diag.evaluations);
        if (rt && rt->size() == r.size()) {
          const double trial_cost = 0.5 * rt->squaredNorm();
          if (trial_cost < cost) {
            x = trial;
            r = *rt;
            cost = trial_cost;
            mu /= opts.damping_decrease;
            accepted = true;
            break;
          }
        }
      }
      mu *= opts.damping_increase;
      if (mu > opts.max_damping) return finish(Termination::kDampingOverflow);
    }

    ++diag.iterations;
    diag.cost_trace.push_back(cost);
    if (cost == 0.0) return finish(Termination::kZeroCost);
  }
  return finish(Termination::kMaxIterations);
}

}  // namespace invsfm
