#pragma once

#include <optional>
#include <vector>

#include "invsfm/geom.h"
#include "invsfm/groups.h"

namespace invsfm {

// Rotation R = R1 R2 R3 taking `first` onto the +x axis and `second` into
// the y > 0 half of the xy-plane, with the intermediate row-1 mixing terms
// f and g. Positive square roots throughout.
struct FrameRotation {
  Mat3 rotation;
  double f = 0.0;
  double g = 0.0;
};

// Throws kDegenerateCrossSection when either vector vanishes, `first` lies
// on the z-axis (x1^2 + y1^2 = 0), or the two are parallel.
FrameRotation frame_rotation(const Vec3& first, const Vec3& second);

// Group element normalizing a configuration onto the cross-section:
//  P0 -> 0, the first frame vector onto +x, the second into the y > 0 half
//  of the xy-plane, every ray point onto the plane x = 1
//  (zoom: principal point -> (1, 0, 0)).
// The frame vectors are (P1 - P0, P2 - P0) for kBase, the two corners for
// kOriented and (P_M - P0, P1 - P0) for kZoom.
struct MovingFrame {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  std::vector<double> lambdas;
  std::optional<double> alpha;
  double f = 0.0;
  double g = 0.0;

  GroupElement as_group_element() const;
};

// Throws kDegenerateCrossSection (see frame_rotation; also a ray point
// orthogonal to the first frame vector), kRayOrthogonalToAxis and
// kSingularFocalFactor (zoom with 1 + m - m^2 = 0).
MovingFrame solve_frame(const SceneConfig& cfg);

// apply(solve_frame(cfg), cfg)
SceneConfig normalize(const SceneConfig& cfg);

// Max entrywise deviation between solve_frame(g.cfg) and
// solve_frame(cfg) o g^-1 over the rotation, translation, depth factors and
// (zoom) alpha.
double verify_equivariance(const SceneConfig& cfg, const GroupElement& g);

// Alternative closed form for the zoom depth factor,
//   |w| / (|d| m + |d| / m) - 1,  w = d / (d.a) + alpha a,
// with d = P_i - P0, a = P_M - P0, m = |a|. It does not put the normalized
// point on x = 1: its (1 + lambda) is (1 + m - m^2) / (1 + m^2) times the
// one solve_frame returns. Kept for comparison only.
double alternative_zoom_lambda(const SceneConfig& cfg, std::size_t index);

}  // namespace invsfm
