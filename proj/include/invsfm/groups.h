#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "invsfm/geom.h"

namespace invsfm {

// The three point-system actions:
//  kBase      camera center + n ray points, rigid motion + depth per ray
//  kOriented  adds two camera-plane corners that move rigidly
//  kZoom      adds the principal point and a focal-length change
enum class Variant { kBase, kOriented, kZoom };

std::string_view to_string(Variant variant);
// Accepts "base", "oriented", "zoom"; throws kParseError otherwise.
Variant parse_variant(std::string_view name);

// Number of auxiliary points carried by a configuration of this variant.
std::size_t aux_count(Variant variant);

// Scalar factor 1 + m - m^2 appearing in the zoom action and invariants,
// where m is the distance between the camera center and the principal point.
inline double focal_factor(double m) { return 1.0 + m - m * m; }

// Camera center, auxiliary points and ray points P_1..P_n.
//
// aux is empty for kBase, {lower corner, upper corner} for kOriented and
// {principal point} for kZoom.
struct SceneConfig {
  Variant variant = Variant::kBase;
  Vec3 p0 = Vec3::Zero();
  std::vector<Vec3> aux;
  std::vector<Vec3> points;

  std::size_t n() const { return points.size(); }

  // Aux arity, n >= 1, finiteness, and every point (and the principal
  // point) distinct from p0. Throws kInvalidConfiguration.
  void validate() const;

  // p0, aux..., points... as a flat coordinate vector and back.
  Eigen::VectorXd flatten() const;
  static SceneConfig unflatten(Variant variant, std::size_t n,
                               const Eigen::VectorXd& coords);
};

// Group element (R, T, lambda_1..lambda_n, alpha).
//
// Composition: rotations and translations compose as rigid motions, and the
// per-ray depth factors and the zoom factor compose multiplicatively in
// (1 + lambda) and (1 + alpha). alpha is ignored outside kZoom.
struct GroupElement {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  std::vector<double> lambdas;
  double alpha = 0.0;

  static GroupElement identity(std::size_t n);
};

// second o first, i.e. apply(compose(b, a), z) == apply(b, apply(a, z)).
GroupElement compose(const GroupElement& second, const GroupElement& first);
GroupElement inverse(const GroupElement& g);

// Applies the action of the configuration's variant.
//
// Base/Oriented: P_i -> R (P_i + lambda_i (P_i - P0)) + T, the other points
// move rigidly.
// Zoom: the principal point moves to P0 + (1 + alpha)(P_M - P0) and every
// ray is turned about P0 inside the plane it spans with the optical axis so
// that its tangent to the axis is multiplied by
// focal_factor(m') / focal_factor(m), m' = (1 + alpha) m; the distance to P0
// is multiplied by (1 + lambda_i). At alpha = 0 and at alpha = 1/m - 1 this
// coincides with the picture-shift rule P_i/(P_i.P_M) + alpha P_M.
//
// Throws kInvalidLambda (lambda_i <= -1, alpha <= -1 for zoom, or a lambda
// count different from n), kRayOrthogonalToAxis, kSingularFocalFactor
// (focal factor of m or m' vanishes). A negative ratio mirrors the ray
// across the axis.
SceneConfig apply(const GroupElement& g, const SceneConfig& cfg);

// Deterministic random element. magnitude >= 1 draws the rotation uniformly
// on SO(3); below 1 the rotation angle is uniform in [0, magnitude]. T is
// uniform in [-magnitude, magnitude]^3, lambdas and alpha uniform in
// (-0.9, magnitude].
GroupElement random_element(Variant variant, std::size_t n, std::uint64_t seed,
                            double magnitude);

// Number of group parameters: 6 + n, plus 1 for kZoom.
std::size_t group_dimension(Variant variant, std::size_t n);

// Numerical rank of the infinitesimal generators at cfg (central
// differences of apply at the identity, rank tolerance 1e-8 * sigma_max).
int orbit_dimension(const SceneConfig& cfg);

// Rank of a matrix with singular values below rel_tol * sigma_max dropped.
int numerical_rank(const Eigen::MatrixXd& m, double rel_tol = 1e-8);

}  // namespace invsfm
