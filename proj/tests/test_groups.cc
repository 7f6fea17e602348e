#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "invsfm/errors.h"
#include "invsfm/groups.h"
#include "test_support.h"

using namespace invsfm;

namespace {

double max_diff(const SceneConfig& a, const SceneConfig& b) {
  return (a.flatten() - b.flatten()).lpNorm<Eigen::Infinity>();
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::kParseError;
}

}  // namespace

TEST_CASE("identity element leaves configurations unchanged") {
  std::mt19937_64 rng(1);
  for (Variant v : {Variant::kBase, Variant::kOriented, Variant::kZoom}) {
    const SceneConfig cfg = test::random_config(v, 4, rng);
    CHECK(max_diff(apply(GroupElement::identity(4), cfg), cfg) < 1e-15);
  }
}

TEST_CASE("base action by hand") {
  SceneConfig cfg;
  cfg.p0 = Vec3::Zero();
  cfg.points = {Vec3(1, 0, 0)};
  GroupElement g = GroupElement::identity(1);
  g.lambdas = {1.0};
  CHECK((apply(g, cfg).points[0] - Vec3(2, 0, 0)).norm() < 1e-15);

  GroupElement h = GroupElement::identity(1);
  h.rotation = rotation_about_axis(Vec3::UnitZ(), M_PI / 2);
  h.translation = Vec3(0, 0, 1);
  const SceneConfig out = apply(h, cfg);
  CHECK((out.p0 - Vec3(0, 0, 1)).norm() < 1e-15);
  CHECK((out.points[0] - Vec3(0, 1, 1)).norm() < 1e-15);
}

TEST_CASE("group law for base and oriented") {
  std::mt19937_64 rng(2);
  for (Variant v : {Variant::kBase, Variant::kOriented}) {
    for (int k = 0; k < 50; ++k) {
      const SceneConfig cfg = test::random_config(v, 5, rng);
      const GroupElement g1 = random_element(v, 5, 100 + k, 1.0);
      const GroupElement g2 = random_element(v, 5, 200 + k, 1.0);
      const SceneConfig a = apply(g2, apply(g1, cfg));
      const SceneConfig b = apply(compose(g2, g1), cfg);
      CHECK(max_diff(a, b) < 1e-10 * (1.0 + a.flatten().lpNorm<Eigen::Infinity>()));
    }
  }
}

TEST_CASE("zoom: inverse undoes the action, rays keep their length at lambda 0") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    const SceneConfig cfg = test::random_config(Variant::kZoom, 4, rng);
    GroupElement g = random_element(Variant::kZoom, 4, 300 + k, 1.0);
    CHECK(max_diff(apply(inverse(g), apply(g, cfg)), cfg) < 1e-9);

    for (double& l : g.lambdas) l = 0.0;
    const SceneConfig out = apply(g, cfg);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(test::close((out.points[i] - out.p0).norm(), (cfg.points[i] - cfg.p0).norm(), 1e-10));
    }
  }
}

TEST_CASE("zoom: alpha commutes with the depth factors") {
  std::mt19937_64 rng(4);
  const SceneConfig cfg = test::random_config(Variant::kZoom, 3, rng);
  GroupElement zoom = GroupElement::identity(3);
  zoom.alpha = 0.4;
  GroupElement depth = GroupElement::identity(3);
  depth.lambdas = {0.5, -0.3, 1.2};
  CHECK(max_diff(apply(zoom, apply(depth, cfg)), apply(depth, apply(zoom, cfg))) < 1e-12);
}

TEST_CASE("zoom: principal point scales by 1 + alpha") {
  SceneConfig cfg;
  cfg.variant = Variant::kZoom;
  cfg.aux = {Vec3(0.5, 0, 0)};
  cfg.points = {Vec3(1, 0.2, 0.1)};
  GroupElement g = GroupElement::identity(1);
  g.alpha = 1.0;
  CHECK((apply(g, cfg).aux[0] - Vec3(1.0, 0, 0)).norm() < 1e-15);
}

TEST_CASE("action errors") {
  SceneConfig cfg;
  cfg.points = {Vec3(1, 0, 0), Vec3(0, 1, 0)};
  GroupElement g = GroupElement::identity(2);
  g.lambdas = {-1.0, 0.0};
  CHECK(code_of([&] { apply(g, cfg); }) == ErrorCode::kInvalidLambda);
  g.lambdas = {0.0};
  CHECK(code_of([&] { apply(g, cfg); }) == ErrorCode::kInvalidLambda);

  SceneConfig zoom;
  zoom.variant = Variant::kZoom;
  zoom.aux = {Vec3(1, 0, 0)};
  zoom.points = {Vec3(0, 1, 0)};
  CHECK(code_of([&] { apply(GroupElement::identity(1), zoom); }) ==
        ErrorCode::kRayOrthogonalToAxis);
}

TEST_CASE("configuration validation") {
  SceneConfig cfg;
  cfg.points = {Vec3::Zero()};
  CHECK(code_of([&] { cfg.validate(); }) == ErrorCode::kInvalidConfiguration);
  cfg.points = {Vec3(1, 0, 0)};
  cfg.validate();
  cfg.variant = Variant::kOriented;
  CHECK(code_of([&] { cfg.validate(); }) == ErrorCode::kInvalidConfiguration);
}

TEST_CASE("flatten round trip") {
  std::mt19937_64 rng(6);
  const SceneConfig cfg = test::random_config(Variant::kOriented, 3, rng);
  const SceneConfig back = SceneConfig::unflatten(Variant::kOriented, 3, cfg.flatten());
  CHECK(max_diff(cfg, back) == 0.0);
}

TEST_CASE("random_element") {
  const GroupElement a = random_element(Variant::kZoom, 3, 42, 0.5);
  const GroupElement b = random_element(Variant::kZoom, 3, 42, 0.5);
  CHECK(a.rotation == b.rotation);
  CHECK(a.translation == b.translation);
  CHECK(a.lambdas == b.lambdas);
  CHECK(a.alpha == b.alpha);

  const GroupElement small = random_element(Variant::kBase, 2, 7, 0.001);
  CHECK(small.translation.lpNorm<Eigen::Infinity>() <= 0.001);
  CHECK(rotation_log(small.rotation).norm() <= 0.001 + 1e-15);
  for (double l : small.lambdas) CHECK(l > -0.9);

  Vec3 mean = Vec3::Zero();
  const int samples = 10000;
  for (int k = 0; k < samples; ++k) {
    const Vec3 w = rotation_log(random_element(Variant::kBase, 1, k, 1.0).rotation);
    if (w.norm() > 0.0) mean += w.normalized();
  }
  CHECK((mean / samples).norm() < 0.05);
}

TEST_CASE("orbit dimensions") {
  std::mt19937_64 rng(8);
  CHECK(orbit_dimension(test::random_config(Variant::kBase, 1, rng)) == 6);
  CHECK(orbit_dimension(test::random_config(Variant::kBase, 5, rng)) == 11);
  CHECK(orbit_dimension(test::random_config(Variant::kOriented, 4, rng)) == 10);
  for (std::size_t n = 2; n <= 8; ++n) {
    CHECK(orbit_dimension(test::random_config(Variant::kBase, n, rng)) == static_cast<int>(6 + n));
    CHECK(orbit_dimension(test::random_config(Variant::kOriented, n, rng)) ==
          static_cast<int>(6 + n));
    CHECK(orbit_dimension(test::random_config(Variant::kZoom, n, rng)) == static_cast<int>(7 + n));
  }
}

TEST_CASE("numerical rank") {
  Eigen::MatrixXd m(3, 3);
  m << 1, 0, 0, 0, 1e-10, 0, 0, 0, 0;
  CHECK(numerical_rank(m) == 1);
  CHECK(numerical_rank(Eigen::MatrixXd::Zero(2, 2)) == 0);
  CHECK(numerical_rank(Eigen::MatrixXd::Identity(4, 4)) == 4);
}
