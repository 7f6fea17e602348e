#include "invsfm/invariants.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "invsfm/errors.h"

namespace invsfm {

std::size_t InvariantVector::expected_length(Variant variant, std::size_t n) {
  switch (variant) {
    case Variant::kBase: return n >= 2 ? 2 * n - 3 : 0;
    case Variant::kOriented: return 2 * n + 3;
    case Variant::kZoom: return n >= 1 ? 2 * n - 1 : 0;
  }
  return 0;
}

std::vector<std::string> invariant_labels(Variant variant, std::size_t n) {
  std::vector<std::string> out;
  auto range = [&](char prefix, std::size_t from) {
    for (std::size_t i = from; i <= n; ++i) out.push_back(prefix + std::to_string(i));
  };
  switch (variant) {
    case Variant::kBase:
      range('I', 2);
      range('J', 3);
      break;
    case Variant::kOriented:
      out = {"IL", "I0", "J0"};
      range('I', 1);
      range('J', 1);
      break;
    case Variant::kZoom:
      range('I', 1);
      range('J', 2);
      break;
  }
  return out;
}

namespace {

// Invariants of one ray d in the frame spanned by (first, second):
// the y and (negated) z coordinates of d after normalization onto x = 1.
struct RayInvariants {
  double i = 0.0;
  double j = 0.0;
};

struct FramePair {
  Vec3 first;
  Vec3 second;
  Vec3 normal;       // first x second
  double normal_len;
  double first_len;
};

FramePair make_pair(const Vec3& first, const Vec3& second, const char* what) {
  FramePair fp{first, second, first.cross(second), 0.0, first.norm()};
  fp.normal_len = fp.normal.norm();
  if (fp.first_len == 0.0 || second.norm() == 0.0 ||
      fp.normal_len < 1e-12 * fp.first_len * second.norm()) {
    throw Error(ErrorCode::kCollinearBaseRays, std::string(what) + " are collinear");
  }
  return fp;
}

double checked_dot(const Vec3& a, const Vec3& b, const std::string& what) {
  const double d = a.dot(b);
  if (std::abs(d) < 1e-12 * a.norm() * b.norm() || a.norm() == 0.0 || b.norm() == 0.0) {
    throw Error(ErrorCode::kOrthogonalRays, what + " is orthogonal to the reference ray");
  }
  return d;
}

RayInvariants ray_invariants(const FramePair& fp, const Vec3& d, const std::string& what) {
  const double along = checked_dot(fp.first, d, what);
  const double denom = along * fp.normal_len;
  RayInvariants out;
  out.i = fp.first.cross(d).dot(fp.normal) / denom;
  out.j = -d.dot(fp.normal) * fp.first_len / denom;  // d.(second x first)
  return out;
}

void check_finite(const InvariantVector& v) {
  for (std::size_t k = 0; k < v.values.size(); ++k) {
    if (!std::isfinite(v.values[k])) {
      throw Error(ErrorCode::kEvaluationError,
                  "invariant " + invariant_labels(v.variant, v.n)[k] + " is not finite");
    }
  }
}

void require_variant(const SceneConfig& cfg, Variant variant) {
  if (cfg.variant != variant) {
    throw Error(ErrorCode::kVariantMismatch,
                std::string(to_string(variant)) + " invariants of a " +
                    std::string(to_string(cfg.variant)) + " configuration");
  }
  cfg.validate();
}

}  // namespace

InvariantVector invariants_base(const SceneConfig& cfg) {
  require_variant(cfg, Variant::kBase);
  const std::size_t n = cfg.n();
  if (n < 2) {
    throw Error(ErrorCode::kInvalidConfiguration, "base invariants need n >= 2");
  }
  const Vec3 v1 = cfg.points[0] - cfg.p0;
  const Vec3 v2 = cfg.points[1] - cfg.p0;
  const FramePair fp = make_pair(v1, v2, "rays 1 and 2");

  InvariantVector out{Variant::kBase, n, {}};
  out.values.resize(InvariantVector::expected_length(Variant::kBase, n));
  out.values[0] = fp.normal_len / checked_dot(v1, v2, "ray 2");
  for (std::size_t i = 2; i < n; ++i) {
    const RayInvariants r =
        ray_invariants(fp, cfg.points[i] - cfg.p0, "ray " + std::to_string(i + 1));
    out.values[i - 1] = r.i;
    out.values[n - 2 + i - 1] = r.j;
  }
  check_finite(out);
  return out;
}

InvariantVector invariants_oriented(const SceneConfig& cfg) {
  require_variant(cfg, Variant::kOriented);
  const std::size_t n = cfg.n();
  const Vec3 u1 = cfg.aux[0] - cfg.p0;
  const Vec3 u2 = cfg.aux[1] - cfg.p0;
  const FramePair fp = make_pair(u1, u2, "camera-plane corners");

  InvariantVector out{Variant::kOriented, n, {}};
  out.values.resize(InvariantVector::expected_length(Variant::kOriented, n));
  out.values[0] = fp.first_len;
  out.values[1] = u2.dot(u1) / fp.first_len;
  out.values[2] = fp.normal_len / fp.first_len;
  for (std::size_t i = 0; i < n; ++i) {
    const RayInvariants r =
        ray_invariants(fp, cfg.points[i] - cfg.p0, "ray " + std::to_string(i + 1));
    out.values[3 + i] = r.i;
    out.values[3 + n + i] = r.j;
  }
  check_finite(out);
  return out;
}

InvariantVector invariants_zoom(const SceneConfig& cfg) {
  require_variant(cfg, Variant::kZoom);
  const std::size_t n = cfg.n();
  const Vec3 a = cfg.aux[0] - cfg.p0;
  const double m = a.norm();
  const double c = focal_factor(m);
  if (std::abs(c) < 1e-12) {
    throw Error(ErrorCode::kSingularFocalFactor,
                "1 + m - m^2 vanishes at m=" + std::to_string(m));
  }
  const Vec3 v1 = cfg.points[0] - cfg.p0;

  InvariantVector out{Variant::kZoom, n, {}};
  out.values.resize(InvariantVector::expected_length(Variant::kZoom, n));
  out.values[0] = a.cross(v1).norm() / (checked_dot(a, v1, "ray 1") * c);
  if (n >= 2) {
    const FramePair fp = make_pair(a, v1, "optical axis and ray 1");
    for (std::size_t i = 1; i < n; ++i) {
      const RayInvariants r =
          ray_invariants(fp, cfg.points[i] - cfg.p0, "ray " + std::to_string(i + 1));
      out.values[i] = r.i / c;
      out.values[n - 1 + i] = r.j / c;
    }
  }
  check_finite(out);
  return out;
}

InvariantVector evaluate_invariants(const SceneConfig& cfg) {
  switch (cfg.variant) {
    case Variant::kBase: return invariants_base(cfg);
    case Variant::kOriented: return invariants_oriented(cfg);
    case Variant::kZoom: return invariants_zoom(cfg);
  }
  throw Error(ErrorCode::kVariantMismatch, "unknown variant");
}

Eigen::MatrixXd invariant_jacobian(const SceneConfig& cfg) {
  const Eigen::VectorXd x = cfg.flatten();
  const std::size_t len = evaluate_invariants(cfg).values.size();
  Eigen::MatrixXd jac(static_cast<Eigen::Index>(len), x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double h = 1e-6 * std::max(1.0, std::abs(x(k)));
    Eigen::VectorXd plus = x, minus = x;
    plus(k) += h;
    minus(k) -= h;
    const auto fp = evaluate_invariants(SceneConfig::unflatten(cfg.variant, cfg.n(), plus));
    const auto fm = evaluate_invariants(SceneConfig::unflatten(cfg.variant, cfg.n(), minus));
    for (std::size_t r = 0; r < len; ++r) {
      jac(static_cast<Eigen::Index>(r), k) = (fp.values[r] - fm.values[r]) / (2.0 * h);
    }
  }
  return jac;
}

int invariant_jacobian_rank(const SceneConfig& cfg) {
  return numerical_rank(invariant_jacobian(cfg));
}

}  // namespace invsfm
