#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "invsfm/groups.h"

namespace invsfm {

// Fundamental invariant values of one configuration, laid out as
//   kBase:     [I_2, I_3..I_n, J_3..J_n]                 (2n - 3)
//   kOriented: [I_L, I_0, J_0, I_1..I_n, J_1..J_n]       (2n + 3)
//   kZoom:     [I_1, I_2..I_n, J_2..J_n]                 (2n - 1)
struct InvariantVector {
  Variant variant = Variant::kBase;
  std::size_t n = 0;
  std::vector<double> values;

  static std::size_t expected_length(Variant variant, std::size_t n);
};

// Targets alpha_i^tau, beta_j^tau: one vector per picture.
using InvariantTargets = std::vector<InvariantVector>;

// Entry names in layout order ("I2", "J3", "IL", ...).
std::vector<std::string> invariant_labels(Variant variant, std::size_t n);

// With v_i = P_i - P0:
//   I_2 = |v1 x v2| / (v1 . v2)
//   I_i = (v1 x vi).(v1 x v2) / ((v1 . vi) |v1 x v2|)
//   J_i = vi.(v2 x v1) |v1| / ((v1 . vi) |v1 x v2|)
// Throws kOrthogonalRays / kCollinearBaseRays when a denominator falls below
// 1e-12 times the product of its operand norms.
InvariantVector invariants_base(const SceneConfig& cfg);

// Same ray invariants relative to the corners u1 = P_L - P0, u2 = P^L - P0
// for every i = 1..n, preceded by I_L = |u1|, I_0 = u2.u1 / |u1| and
// J_0 = |u1 x u2| / |u1|.
InvariantVector invariants_oriented(const SceneConfig& cfg);

// With a = P_M - P0, m = |a|, c = 1 + m - m^2:
//   I_1 = |a x v1| / ((v1.a) c)
//   I_i = (a x vi).(a x v1) / (|a x v1| (vi.a) c)
//   J_i = vi.(v1 x a) m / (|a x v1| (vi.a) c)
// Throws kSingularFocalFactor when |c| < 1e-12, plus the ray errors above.
InvariantVector invariants_zoom(const SceneConfig& cfg);

// Dispatches on cfg.variant.
InvariantVector evaluate_invariants(const SceneConfig& cfg);

// Numerical rank (tolerance 1e-8 * sigma_max) of the central-difference
// Jacobian of the invariant vector with respect to every coordinate of cfg.
int invariant_jacobian_rank(const SceneConfig& cfg);

Eigen::MatrixXd invariant_jacobian(const SceneConfig& cfg);

}  // namespace invsfm
