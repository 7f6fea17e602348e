#include "invsfm/synth.h"

#include <cmath>
#include <random>
#include <string>

#include "invsfm/errors.h"

namespace invsfm {

void PictureTracks::validate() const {
  if (pictures.empty()) {
    throw Error(ErrorCode::kInvalidConfiguration, "no pictures");
  }
  const std::size_t count = n();
  if (count == 0) {
    throw Error(ErrorCode::kInvalidConfiguration, "pictures have no observations");
  }
  for (std::size_t tau = 0; tau < pictures.size(); ++tau) {
    const Picture& pic = pictures[tau];
    const std::string where = "picture " + std::to_string(tau + 1);
    if (pic.observations.size() != count) {
      throw Error(ErrorCode::kInvalidConfiguration,
                  where + " has " + std::to_string(pic.observations.size()) +
                      " observations, expected " + std::to_string(count));
    }
    if (!(pic.focal > 0.0) || !std::isfinite(pic.focal)) {
      throw Error(ErrorCode::kInvalidConfiguration, where + " has a non-positive focal");
    }
    for (std::size_t i = 0; i < count; ++i) {
      const Observation& o = pic.observations[i];
      if (o.point_id != static_cast<int>(i + 1)) {
        throw Error(ErrorCode::kInvalidConfiguration,
                    where + ": point ids must be 1.." + std::to_string(count) + " in order");
      }
      if (!std::isfinite(o.u) || !std::isfinite(o.v)) {
        throw Error(ErrorCode::kInvalidConfiguration,
                    where + ": point " + std::to_string(o.point_id) + " is not finite");
      }
    }
  }
}

std::string_view to_string(TrajectoryKind kind) {
  switch (kind) {
    case TrajectoryKind::kOrbit: return "orbit";
    case TrajectoryKind::kTranslation: return "translation";
    case TrajectoryKind::kPureRotation: return "pure_rotation";
  }
  return "unknown";
}

TrajectoryKind parse_trajectory_kind(std::string_view name) {
  if (name == "orbit") return TrajectoryKind::kOrbit;
  if (name == "translation") return TrajectoryKind::kTranslation;
  if (name == "pure_rotation") return TrajectoryKind::kPureRotation;
  throw Error(ErrorCode::kParseError, "unknown trajectory kind '" + std::string(name) + "'");
}

Scene generate_scene(std::size_t n, std::uint64_t seed, double spread) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-spread, spread);
  const double min_dist = 0.01 * spread;

  Scene scene;
  scene.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vec3 candidate;
    bool ok = false;
    for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
      candidate = Vec3(coord(rng), coord(rng), coord(rng));
      ok = true;
      for (const Vec3& p : scene.points) {
        if ((p - candidate).norm() <= min_dist) {
          ok = false;
          break;
        }
      }
    }
    if (!ok) {
      std::normal_distribution<double> jitter(0.0, min_dist);
      candidate += Vec3(jitter(rng), jitter(rng), jitter(rng));
    }
    scene.points.push_back(candidate);
  }
  scene.diameter = diameter(scene.points);
  return scene;
}

Mat3 look_at_rotation(const Vec3& center, const Vec3& target) {
  const Vec3 forward = (target - center).normalized();
  Vec3 up = Vec3::UnitZ();
  if (std::abs(forward.dot(up)) > 0.999) up = Vec3::UnitY();
  const Vec3 cam_z = (up - up.dot(forward) * forward).normalized();
  const Vec3 cam_y = cam_z.cross(forward);
  Mat3 rot;
  rot.row(0) = forward;
  rot.row(1) = cam_y;
  rot.row(2) = cam_z;
  return rot;
}

std::vector<CameraPose> generate_trajectory(std::size_t t, TrajectoryKind kind,
                                            const TrajectoryParams& params,
                                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<double> focals(t, params.focal);
  if (params.focal_spread > 0.0) {
    std::mt19937_64 focal_rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> f(1.0 - params.focal_spread, 1.0 + params.focal_spread);
    for (double& v : focals) v = params.focal * f(focal_rng);
  }

  std::vector<CameraPose> poses(t);
  switch (kind) {
    case TrajectoryKind::kOrbit: {
      const double start = 2.0 * M_PI * unit(rng);
      for (std::size_t k = 0; k < t; ++k) {
        const double phi = start + (t > 1 ? params.arc * static_cast<double>(k) /
                                                static_cast<double>(t - 1)
                                          : 0.0);
        const Vec3 dir(std::cos(phi) * std::cos(params.elevation),
                       std::sin(phi) * std::cos(params.elevation), std::sin(params.elevation));
        poses[k].center = params.look_at + params.radius * dir;
        poses[k].rotation = look_at_rotation(poses[k].center, params.look_at);
      }
      break;
    }
    case TrajectoryKind::kTranslation: {
      const Vec3 start = params.look_at - params.radius * Vec3::UnitX();
      const Mat3 rot = look_at_rotation(start, params.look_at);
      for (std::size_t k = 0; k < t; ++k) {
        poses[k].center = start + static_cast<double>(k) * params.step;
        poses[k].rotation = rot;
      }
      break;
    }
    case TrajectoryKind::kPureRotation: {
      const double phi = 2.0 * M_PI * unit(rng);
      const Vec3 center =
          params.look_at + params.radius * Vec3(std::cos(phi), std::sin(phi), 0.0);
      const Mat3 base = look_at_rotation(center, params.look_at);
      for (std::size_t k = 0; k < t; ++k) {
        const Vec3 axis(normal(rng), normal(rng), normal(rng));
        const double angle = params.max_angle * unit(rng);
        poses[k].center = center;
        poses[k].rotation = rotation_about_axis(axis, angle) * base;
      }
      break;
    }
  }
  for (std::size_t k = 0; k < t; ++k) poses[k].focal = focals[k];
  return poses;
}

Picture project(const Scene& scene, const CameraPose& pose) {
  Picture pic;
  pic.focal = pose.focal;
  pic.observations.reserve(scene.points.size());
  for (std::size_t i = 0; i < scene.points.size(); ++i) {
    const Vec3 q = pose.rotation * (scene.points[i] - pose.center);
    if (q.x() <= 1e-9) {
      throw Error(ErrorCode::kPointBehindCamera,
                  "point " + std::to_string(i + 1) + " is not in front of the camera");
    }
    pic.observations.push_back({static_cast<int>(i + 1), q.y() / q.x(), q.z() / q.x()});
  }
  return pic;
}

SceneConfig embed_picture(const Picture& picture, Variant variant, const FrameBounds& bounds) {
  const double f = picture.focal;
  SceneConfig cfg;
  cfg.variant = variant;
  cfg.p0 = Vec3::Zero();
  if (variant == Variant::kOriented) {
    cfg.aux = {f * Vec3(1.0, bounds.u_min, bounds.v_min),
               f * Vec3(1.0, bounds.u_min, bounds.v_max)};
  } else if (variant == Variant::kZoom) {
    cfg.aux = {Vec3(f, 0.0, 0.0)};
  }
  cfg.points.reserve(picture.observations.size());
  for (const Observation& o : picture.observations) {
    cfg.points.push_back(f * Vec3(1.0, o.u, o.v));
  }
  return cfg;
}

SceneConfig true_configuration(const Scene& scene, const CameraPose& pose, Variant variant,
                               const FrameBounds& bounds) {
  const Mat3 to_world = pose.rotation.transpose();
  const double f = pose.focal;
  SceneConfig cfg;
  cfg.variant = variant;
  cfg.p0 = pose.center;
  if (variant == Variant::kOriented) {
    cfg.aux = {pose.center + to_world * (f * Vec3(1.0, bounds.u_min, bounds.v_min)),
               pose.center + to_world * (f * Vec3(1.0, bounds.u_min, bounds.v_max))};
  } else if (variant == Variant::kZoom) {
    cfg.aux = {pose.center + to_world * Vec3(f, 0.0, 0.0)};
  }
  cfg.points = scene.points;
  return cfg;
}

Picture add_noise(const Picture& picture, double sigma, std::uint64_t seed) {
  Picture out = picture;
  if (sigma <= 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  for (Observation& o : out.observations) {
    o.u += noise(rng);
    o.v += noise(rng);
  }
  return out;
}

SyntheticSequence synthesize(std::size_t n, std::size_t t, TrajectoryKind kind, double sigma,
                             std::uint64_t seed, Variant variant, TrajectoryParams params) {
  SyntheticSequence seq;
  seq.scene = generate_scene(n, seed);
  params.look_at = centroid(seq.scene.points);
  seq.poses = generate_trajectory(t, kind, params, seed + 1);
  seq.tracks.variant = variant;
  for (std::size_t k = 0; k < t; ++k) {
    seq.tracks.pictures.push_back(
        add_noise(project(seq.scene, seq.poses[k]), sigma, seed + 1000 + k));
  }
  return seq;
}

}  // namespace invsfm
