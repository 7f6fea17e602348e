#include "invsfm/frames.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "invsfm/errors.h"

namespace invsfm {

FrameRotation frame_rotation(const Vec3& first, const Vec3& second) {
  const double r = first.norm();
  const double r2 = second.norm();
  if (r == 0.0 || r2 == 0.0) {
    throw Error(ErrorCode::kDegenerateCrossSection, "zero-length frame vector");
  }
  const double x1 = first.x(), y1 = first.y(), z1 = first.z();
  const double x2 = second.x(), y2 = second.y(), z2 = second.z();
  const double s = std::sqrt(x1 * x1 + y1 * y1);
  if (s <= 1e-12 * r) {
    throw Error(ErrorCode::kDegenerateCrossSection,
                "first frame vector lies on the z-axis");
  }

  FrameRotation out;
  out.f = (-y1 * x2 + x1 * y2) / s;
  out.g = (z2 * s * s - z1 * (x1 * x2 + y1 * y2)) / (s * r);
  const double h = std::hypot(out.f, out.g);
  if (h <= 1e-12 * r2) {
    throw Error(ErrorCode::kDegenerateCrossSection, "frame vectors are parallel");
  }

  Mat3 r1;
  r1 << 1.0, 0.0, 0.0,
        0.0, out.f / h, out.g / h,
        0.0, -out.g / h, out.f / h;
  Mat3 r2m;
  r2m << s / r, 0.0, z1 / r,
         0.0, 1.0, 0.0,
         -z1 / r, 0.0, s / r;
  Mat3 r3;
  r3 << x1 / s, y1 / s, 0.0,
        -y1 / s, x1 / s, 0.0,
        0.0, 0.0, 1.0;
  out.rotation = r1 * r2m * r3;
  return out;
}

GroupElement MovingFrame::as_group_element() const {
  GroupElement g;
  g.rotation = rotation;
  g.translation = translation;
  g.lambdas = lambdas;
  g.alpha = alpha.value_or(0.0);
  return g;
}

MovingFrame solve_frame(const SceneConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.n();

  Vec3 first, second;
  switch (cfg.variant) {
    case Variant::kBase:
      if (n < 2) {
        throw Error(ErrorCode::kDegenerateCrossSection,
                    "base frame needs at least two points");
      }
      first = cfg.points[0] - cfg.p0;
      second = cfg.points[1] - cfg.p0;
      break;
    case Variant::kOriented:
      first = cfg.aux[0] - cfg.p0;
      second = cfg.aux[1] - cfg.p0;
      break;
    case Variant::kZoom:
      first = cfg.aux[0] - cfg.p0;
      second = cfg.points[0] - cfg.p0;
      break;
  }

  const FrameRotation fr = frame_rotation(first, second);
  MovingFrame frame;
  frame.rotation = fr.rotation;
  frame.f = fr.f;
  frame.g = fr.g;
  frame.translation = -(fr.rotation * cfg.p0);
  frame.lambdas.resize(n);

  if (cfg.variant != Variant::kZoom) {
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3 d = cfg.points[i] - cfg.p0;
      const double x = (fr.rotation * d).x();
      if (std::abs(x) <= 1e-12 * d.norm()) {
        throw Error(ErrorCode::kDegenerateCrossSection,
                    "point " + std::to_string(i + 1) +
                        " is orthogonal to the first frame vector");
      }
      frame.lambdas[i] = 1.0 / x - 1.0;
    }
    return frame;
  }

  const double m = first.norm();
  const double c = focal_factor(m);
  if (std::abs(c) < 1e-12) {
    throw Error(ErrorCode::kSingularFocalFactor,
                "focal factor 1 + m - m^2 vanishes at m=" + std::to_string(m));
  }
  frame.alpha = 1.0 / m - 1.0;
  // Normalizing to m = 1 multiplies every tangent to the axis by 1/c.
  const Vec3 axis_dir = first / m;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 d = cfg.points[i] - cfg.p0;
    const double along = d.dot(axis_dir);
    if (std::abs(along) < 1e-12 * d.norm()) {
      throw Error(ErrorCode::kRayOrthogonalToAxis,
                  "point " + std::to_string(i + 1) + " is orthogonal to the optical axis");
    }
    const Vec3 turned = along * axis_dir + (d - along * axis_dir) / c;
    frame.lambdas[i] = turned.norm() / (d.norm() * along) - 1.0;
  }
  return frame;
}

SceneConfig normalize(const SceneConfig& cfg) {
  return apply(solve_frame(cfg).as_group_element(), cfg);
}

double verify_equivariance(const SceneConfig& cfg, const GroupElement& g) {
  const GroupElement moved_frame =
      solve_frame(apply(g, cfg)).as_group_element();
  const GroupElement expected =
      compose(solve_frame(cfg).as_group_element(), inverse(g));

  double dev = (moved_frame.rotation - expected.rotation).cwiseAbs().maxCoeff();
  dev = std::max(dev, (moved_frame.translation - expected.translation).cwiseAbs().maxCoeff());
  for (std::size_t i = 0; i < expected.lambdas.size(); ++i) {
    dev = std::max(dev, std::abs(moved_frame.lambdas[i] - expected.lambdas[i]));
  }
  if (cfg.variant == Variant::kZoom) {
    dev = std::max(dev, std::abs(moved_frame.alpha - expected.alpha));
  }
  return dev;
}

double alternative_zoom_lambda(const SceneConfig& cfg, std::size_t index) {
  if (cfg.variant != Variant::kZoom) {
    throw Error(ErrorCode::kVariantMismatch, "zoom depth factor of a non-zoom configuration");
  }
  cfg.validate();
  const Vec3 a = cfg.aux[0] - cfg.p0;
  const Vec3 d = cfg.points.at(index) - cfg.p0;
  const double m = a.norm();
  const double alpha = 1.0 / m - 1.0;
  const Vec3 w = d / d.dot(a) + alpha * a;
  return w.norm() / (d.norm() * m + d.norm() / m) - 1.0;
}

}  // namespace invsfm
