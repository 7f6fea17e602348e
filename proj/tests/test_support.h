#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "invsfm/geom.h"
#include "invsfm/groups.h"

namespace invsfm::test {

inline Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Quaterniond q(normal(rng), normal(rng), normal(rng), normal(rng));
  q.normalize();
  return q.toRotationMatrix();
}

inline double sine_between(const Vec3& a, const Vec3& b) {
  return a.cross(b).norm() / (a.norm() * b.norm());
}

inline double cosine_between(const Vec3& a, const Vec3& b) {
  return a.dot(b) / (a.norm() * b.norm());
}

// Unit-scale configuration whose rays (and corners) stay inside a cone
// about a random axis, so every invariant denominator is well away from
// zero. Zoom draws m = |P_M - P0| in [0.3, 0.75], which keeps the focal
// factor positive for alpha up to 1.
inline SceneConfig random_config(Variant variant, std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> len(0.5, 1.5);
  std::uniform_real_distribution<double> focal(0.3, 0.75);
  while (true) {
    const Mat3 rot = random_rotation(rng);
    SceneConfig cfg;
    cfg.variant = variant;
    cfg.p0 = 0.5 * Vec3(u(rng), u(rng), u(rng));
    auto ray = [&]() -> Vec3 {
      return cfg.p0 + len(rng) * (rot * Vec3(1.0, 0.5 * u(rng), 0.5 * u(rng)));
    };
    if (variant == Variant::kOriented) cfg.aux = {ray(), ray()};
    if (variant == Variant::kZoom) cfg.aux = {cfg.p0 + rot * Vec3(focal(rng), 0.0, 0.0)};
    for (std::size_t i = 0; i < n; ++i) cfg.points.push_back(ray());

    Vec3 first, second;
    if (variant == Variant::kBase) {
      first = cfg.points[0] - cfg.p0;
      second = n > 1 ? cfg.points[1] - cfg.p0 : Vec3(rot * Vec3(0, 1, 0));
    } else if (variant == Variant::kOriented) {
      first = cfg.aux[0] - cfg.p0;
      second = cfg.aux[1] - cfg.p0;
    } else {
      first = cfg.aux[0] - cfg.p0;
      second = cfg.points[0] - cfg.p0;
    }
    if (sine_between(first, second) < 0.15) continue;
    // Keep clear of the z-axis so the frame's first rotation is well defined
    // after random group motions.
    bool ok = true;
    for (const Vec3& p : cfg.points) ok = ok && cosine_between(first, p - cfg.p0) > 0.3;
    if (ok) return cfg;
  }
}

// |a - b| <= rel * max(|a|, |b|), or <= abs_tol near zero.
inline bool close(double a, double b, double rel, double abs_tol = 1e-12) {
  const double diff = std::abs(a - b);
  return diff <= abs_tol || diff <= rel * std::max(std::abs(a), std::abs(b));
}

}  // namespace invsfm::test
