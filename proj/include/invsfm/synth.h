#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "invsfm/geom.h"
#include "invsfm/groups.h"

namespace invsfm {

// Pinhole camera. Camera coordinates are q = rotation * (X - center); the
// optical axis is +x and the image plane sits at x = focal.
struct CameraPose {
  Vec3 center = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();  // world to camera
  double focal = 1.0;
};

// Object points O_1..O_n; point ids are 1-based positions.
struct Scene {
  std::vector<Vec3> points;
  double diameter = 0.0;
};

struct Observation {
  int point_id = 0;
  double u = 0.0;
  double v = 0.0;
};

// One picture: calibrated (unit-focal) image coordinates, ordered by id.
struct Picture {
  std::vector<Observation> observations;
  double focal = 1.0;
};

// Image window used to place the camera-plane corners of the oriented
// variant.
struct FrameBounds {
  double u_min = -0.5;
  double u_max = 0.5;
  double v_min = -0.5;
  double v_max = 0.5;
};

struct PictureTracks {
  Variant variant = Variant::kBase;
  std::vector<Picture> pictures;
  FrameBounds bounds;

  std::size_t t() const { return pictures.size(); }
  std::size_t n() const { return pictures.empty() ? 0 : pictures.front().observations.size(); }

  // Full visibility with ids 1..n in every picture, finite coordinates,
  // positive focals. Throws kInvalidConfiguration.
  void validate() const;
};

enum class TrajectoryKind { kOrbit, kTranslation, kPureRotation };

std::string_view to_string(TrajectoryKind kind);
// "orbit", "translation", "pure_rotation"; throws kParseError.
TrajectoryKind parse_trajectory_kind(std::string_view name);

struct TrajectoryParams {
  Vec3 look_at = Vec3::Zero();
  double radius = 5.0;
  double arc = 1.5707963267948966;  // total azimuth covered by an orbit
  double elevation = 0.3;           // orbit elevation above the look-at plane
  Vec3 step = Vec3(0.0, 0.5, 0.0);  // translation between consecutive centers
  double max_angle = 0.3;           // pure rotation
  double focal = 1.0;
  double focal_spread = 0.0;        // per-pose focal uniform in focal * [1 -+ spread]
};

// Points uniform in [-spread, spread]^3 with pairwise distance above
// 0.01 * spread (rejection, then jitter after 100 tries).
Scene generate_scene(std::size_t n, std::uint64_t seed, double spread = 1.0);

// World-to-camera rotation looking from `center` at `target`, +z of the
// camera as close to world +z as possible.
Mat3 look_at_rotation(const Vec3& center, const Vec3& target);

// orbit: centers on a circle of `radius` about look_at, looking at it.
// translation: fixed rotation looking along +x, centers on a line.
// pure_rotation: one center, orientations turned about random axes by at
// most max_angle.
std::vector<CameraPose> generate_trajectory(std::size_t t, TrajectoryKind kind,
                                            const TrajectoryParams& params,
                                            std::uint64_t seed);

// Throws kPointBehindCamera when some q_x <= 1e-9.
Picture project(const Scene& scene, const CameraPose& pose);

// Camera center at the origin, point i at focal * (1, u_i, v_i). Oriented
// adds corners focal * (1, u_min, v_min), focal * (1, u_min, v_max); zoom
// adds the principal point (focal, 0, 0).
SceneConfig embed_picture(const Picture& picture, Variant variant,
                          const FrameBounds& bounds = {});

// The actual camera-object configuration (center, auxiliary points mapped
// through the pose, object points) the embedded picture is equivalent to.
SceneConfig true_configuration(const Scene& scene, const CameraPose& pose, Variant variant,
                               const FrameBounds& bounds = {});

// i.i.d. Gaussian perturbation of every (u, v).
Picture add_noise(const Picture& picture, double sigma, std::uint64_t seed);

struct SyntheticSequence {
  Scene scene;
  std::vector<CameraPose> poses;
  PictureTracks tracks;
};

// Scene, trajectory aimed at the scene centroid, projections and noise.
SyntheticSequence synthesize(std::size_t n, std::size_t t, TrajectoryKind kind, double sigma,
                             std::uint64_t seed, Variant variant = Variant::kBase,
                             TrajectoryParams params = {});

}  // namespace invsfm
