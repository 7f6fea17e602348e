#include "invsfm/groups.h"

#include <cmath>
#include <random>
#include <string>

#include <Eigen/SVD>

#include "invsfm/errors.h"

namespace invsfm {

std::string_view to_string(Variant variant) {
  switch (variant) {
    case Variant::kBase: return "base";
    case Variant::kOriented: return "oriented";
    case Variant::kZoom: return "zoom";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  if (name == "base") return Variant::kBase;
  if (name == "oriented") return Variant::kOriented;
  if (name == "zoom") return Variant::kZoom;
  throw Error(ErrorCode::kParseError,
              "unknown variant '" + std::string(name) + "'");
}

std::size_t aux_count(Variant variant) {
  switch (variant) {
    case Variant::kBase: return 0;
    case Variant::kOriented: return 2;
    case Variant::kZoom: return 1;
  }
  return 0;
}

void SceneConfig::validate() const {
  if (aux.size() != aux_count(variant)) {
    throw Error(ErrorCode::kInvalidConfiguration,
                std::string(to_string(variant)) + " configuration needs " +
                    std::to_string(aux_count(variant)) + " auxiliary points, got " +
                    std::to_string(aux.size()));
  }
  if (points.empty()) {
    throw Error(ErrorCode::kInvalidConfiguration, "configuration has no points");
  }
  if (!p0.allFinite()) {
    throw Error(ErrorCode::kInvalidConfiguration, "camera center is not finite");
  }
  for (const Vec3& a : aux) {
    if (!a.allFinite()) {
      throw Error(ErrorCode::kInvalidConfiguration, "auxiliary point is not finite");
    }
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!points[i].allFinite()) {
      throw Error(ErrorCode::kInvalidConfiguration,
                  "point " + std::to_string(i + 1) + " is not finite");
    }
    if ((points[i] - p0).norm() == 0.0) {
      throw Error(ErrorCode::kInvalidConfiguration,
                  "point " + std::to_string(i + 1) + " coincides with the camera center");
    }
  }
  if (variant == Variant::kZoom && (aux[0] - p0).norm() == 0.0) {
    throw Error(ErrorCode::kInvalidConfiguration,
                "principal point coincides with the camera center");
  }
}

Eigen::VectorXd SceneConfig::flatten() const {
  Eigen::VectorXd out(3 * (1 + aux.size() + points.size()));
  out.segment<3>(0) = p0;
  std::size_t k = 3;
  for (const Vec3& a : aux) {
    out.segment<3>(k) = a;
    k += 3;
  }
  for (const Vec3& p : points) {
    out.segment<3>(k) = p;
    k += 3;
  }
  return out;
}

SceneConfig SceneConfig::unflatten(Variant variant, std::size_t n,
                                   const Eigen::VectorXd& coords) {
  const std::size_t na = aux_count(variant);
  if (static_cast<std::size_t>(coords.size()) != 3 * (1 + na + n)) {
    throw Error(ErrorCode::kLengthMismatch, "coordinate vector has wrong length");
  }
  SceneConfig cfg;
  cfg.variant = variant;
  cfg.p0 = coords.segment<3>(0);
  std::size_t k = 3;
  for (std::size_t i = 0; i < na; ++i, k += 3) cfg.aux.push_back(coords.segment<3>(k));
  for (std::size_t i = 0; i < n; ++i, k += 3) cfg.points.push_back(coords.segment<3>(k));
  return cfg;
}

GroupElement GroupElement::identity(std::size_t n) {
  GroupElement g;
  g.lambdas.assign(n, 0.0);
  return g;
}

GroupElement compose(const GroupElement& second, const GroupElement& first) {
  if (second.lambdas.size() != first.lambdas.size()) {
    throw Error(ErrorCode::kLengthMismatch, "composing elements of different ray counts");
  }
  GroupElement out;
  out.rotation = second.rotation * first.rotation;
  out.translation = second.rotation * first.translation + second.translation;
  out.lambdas.resize(first.lambdas.size());
  for (std::size_t i = 0; i < first.lambdas.size(); ++i) {
    out.lambdas[i] = (1.0 + second.lambdas[i]) * (1.0 + first.lambdas[i]) - 1.0;
  }
  out.alpha = (1.0 + second.alpha) * (1.0 + first.alpha) - 1.0;
  return out;
}

GroupElement inverse(const GroupElement& g) {
  GroupElement out;
  out.rotation = g.rotation.transpose();
  out.translation = -(out.rotation * g.translation);
  out.lambdas.resize(g.lambdas.size());
  for (std::size_t i = 0; i < g.lambdas.size(); ++i) {
    out.lambdas[i] = 1.0 / (1.0 + g.lambdas[i]) - 1.0;
  }
  out.alpha = 1.0 / (1.0 + g.alpha) - 1.0;
  return out;
}

namespace {

void check_lambdas(const GroupElement& g, const SceneConfig& cfg) {
  if (g.lambdas.size() != cfg.n()) {
    throw Error(ErrorCode::kInvalidLambda,
                "element carries " + std::to_string(g.lambdas.size()) +
                    " depth factors for " + std::to_string(cfg.n()) + " points");
  }
  for (std::size_t i = 0; i < g.lambdas.size(); ++i) {
    if (!(g.lambdas[i] > -1.0) || !std::isfinite(g.lambdas[i])) {
      throw Error(ErrorCode::kInvalidLambda,
                  "lambda_" + std::to_string(i + 1) + " must exceed -1");
    }
  }
  if (cfg.variant == Variant::kZoom && (!(g.alpha > -1.0) || !std::isfinite(g.alpha))) {
    throw Error(ErrorCode::kInvalidLambda, "alpha must exceed -1");
  }
}

}  // namespace

SceneConfig apply(const GroupElement& g, const SceneConfig& cfg) {
  cfg.validate();
  check_lambdas(g, cfg);

  auto rigid = [&](const Vec3& x) -> Vec3 { return g.rotation * x + g.translation; };

  SceneConfig out;
  out.variant = cfg.variant;
  out.p0 = rigid(cfg.p0);
  out.points.resize(cfg.n());

  if (cfg.variant != Variant::kZoom) {
    for (const Vec3& a : cfg.aux) out.aux.push_back(rigid(a));
    for (std::size_t i = 0; i < cfg.n(); ++i) {
      const Vec3& p = cfg.points[i];
      out.points[i] = rigid(p + g.lambdas[i] * (p - cfg.p0));
    }
    return out;
  }

  const Vec3 axis = cfg.aux[0] - cfg.p0;
  const double m = axis.norm();
  const Vec3 axis_dir = axis / m;
  const double m_new = (1.0 + g.alpha) * m;
  const double c_old = focal_factor(m);
  const double c_new = focal_factor(m_new);
  if (std::abs(c_old) < 1e-12 || std::abs(c_new) < 1e-12) {
    throw Error(ErrorCode::kSingularFocalFactor,
                "focal factor vanishes at m=" + std::to_string(m) +
                    " or m'=" + std::to_string(m_new));
  }
  const double tan_scale = c_new / c_old;

  out.aux.push_back(rigid(cfg.p0 + (1.0 + g.alpha) * axis));
  for (std::size_t i = 0; i < cfg.n(); ++i) {
    const Vec3 d = cfg.points[i] - cfg.p0;
    const double len = d.norm();
    const double along = d.dot(axis_dir);
    if (std::abs(along) < 1e-12 * len) {
      throw Error(ErrorCode::kRayOrthogonalToAxis,
                  "point " + std::to_string(i + 1) + " is orthogonal to the optical axis");
    }
    const Vec3 across = d - along * axis_dir;
    const Vec3 dir = (along * axis_dir + tan_scale * across).normalized();
    out.points[i] = rigid(cfg.p0 + (1.0 + g.lambdas[i]) * len * dir);
  }
  return out;
}

GroupElement random_element(Variant variant, std::size_t n, std::uint64_t seed,
                            double magnitude) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-magnitude, magnitude);
  // (-0.9, magnitude]: draw from [-0.9, magnitude) and reflect.
  std::uniform_real_distribution<double> depth(-0.9, magnitude);
  auto draw_depth = [&] { return magnitude - 0.9 - depth(rng); };

  GroupElement g;
  if (magnitude >= 1.0) {
    Eigen::Quaterniond q(normal(rng), normal(rng), normal(rng), normal(rng));
    q.normalize();
    g.rotation = q.toRotationMatrix();
  } else {
    const Vec3 axis(normal(rng), normal(rng), normal(rng));
    std::uniform_real_distribution<double> angle(0.0, magnitude);
    g.rotation = rotation_about_axis(axis, angle(rng));
  }
  g.translation = Vec3(sym(rng), sym(rng), sym(rng));
  g.lambdas.resize(n);
  for (double& l : g.lambdas) l = draw_depth();
  if (variant == Variant::kZoom) g.alpha = draw_depth();
  return g;
}

std::size_t group_dimension(Variant variant, std::size_t n) {
  return 6 + n + (variant == Variant::kZoom ? 1 : 0);
}

int numerical_rank(const Eigen::MatrixXd& m, double rel_tol) {
  if (m.size() == 0) return 0;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > rel_tol * s(0)) ++rank;
  }
  return rank;
}

int orbit_dimension(const SceneConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.n();
  const std::size_t dim = group_dimension(cfg.variant, n);
  const double h = 1e-6;

  Eigen::MatrixXd gens(cfg.flatten().size(), static_cast<Eigen::Index>(dim));
  auto column = [&](std::size_t col, const GroupElement& plus, const GroupElement& minus) {
    gens.col(static_cast<Eigen::Index>(col)) =
        (apply(plus, cfg).flatten() - apply(minus, cfg).flatten()) / (2.0 * h);
  };

  std::size_t col = 0;
  for (int k = 0; k < 3; ++k, ++col) {
    GroupElement plus = GroupElement::identity(n);
    GroupElement minus = GroupElement::identity(n);
    plus.rotation = rotation_about_axis(Vec3::Unit(k), h);
    minus.rotation = rotation_about_axis(Vec3::Unit(k), -h);
    column(col, plus, minus);
  }
  for (int k = 0; k < 3; ++k, ++col) {
    GroupElement plus = GroupElement::identity(n);
    GroupElement minus = GroupElement::identity(n);
    plus.translation = h * Vec3::Unit(k);
    minus.translation = -h * Vec3::Unit(k);
    column(col, plus, minus);
  }
  for (std::size_t i = 0; i < n; ++i, ++col) {
    GroupElement plus = GroupElement::identity(n);
    GroupElement minus = GroupElement::identity(n);
    plus.lambdas[i] = h;
    minus.lambdas[i] = -h;
    column(col, plus, minus);
  }
  if (cfg.variant == Variant::kZoom) {
    GroupElement plus = GroupElement::identity(n);
    GroupElement minus = GroupElement::identity(n);
    plus.alpha = h;
    minus.alpha = -h;
    column(col, plus, minus);
  }
  return numerical_rank(gens);
}

}  // namespace invsfm
