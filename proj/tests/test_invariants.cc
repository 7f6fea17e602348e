#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "invsfm/errors.h"
#include "invsfm/invariants.h"
#include "test_support.h"

using namespace invsfm;

namespace {

ErrorCode code_of(const SceneConfig& cfg) {
  try {
    evaluate_invariants(cfg);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::kParseError;
}

SceneConfig make(Variant v, std::vector<Vec3> aux, std::vector<Vec3> pts) {
  SceneConfig cfg;
  cfg.variant = v;
  cfg.aux = std::move(aux);
  cfg.points = std::move(pts);
  return cfg;
}

}  // namespace

TEST_CASE("base invariants by hand") {
  const InvariantVector two = invariants_base(make(Variant::kBase, {}, {{1, 0, 0}, {1, 1, 0}}));
  REQUIRE(two.values.size() == 1);
  CHECK(two.values[0] == doctest::Approx(1.0));

  const InvariantVector three =
      invariants_base(make(Variant::kBase, {}, {{1, 0, 0}, {1, 1, 0}, {1, 0, 1}}));
  REQUIRE(three.values.size() == 3);
  CHECK(three.values[0] == doctest::Approx(1.0));
  CHECK(std::abs(three.values[1]) < 1e-15);
  CHECK(three.values[2] == doctest::Approx(-1.0));

  CHECK(code_of(make(Variant::kBase, {}, {{1, 0, 0}, {2, 0, 0}})) ==
        ErrorCode::kCollinearBaseRays);
  CHECK(code_of(make(Variant::kBase, {}, {{1, 0, 0}, {1, 1, 0}, {0, 1, 1}})) ==
        ErrorCode::kOrthogonalRays);
}

TEST_CASE("oriented invariants by hand") {
  const InvariantVector v =
      invariants_oriented(make(Variant::kOriented, {{1, 0, 0}, {1, 1, 0}}, {{1, 0.5, 0.5}}));
  REQUIRE(v.values.size() == 5);
  CHECK(v.values[0] == doctest::Approx(1.0));
  CHECK(v.values[1] == doctest::Approx(1.0));
  CHECK(v.values[2] == doctest::Approx(1.0));

  CHECK(code_of(make(Variant::kOriented, {{1, 0.2, 0}, {3, 0.6, 0}}, {{1, 0, 0}})) ==
        ErrorCode::kCollinearBaseRays);
}

TEST_CASE("oriented scaling about the center") {
  std::mt19937_64 rng(31);
  const SceneConfig cfg = test::random_config(Variant::kOriented, 4, rng);
  SceneConfig big = cfg;
  for (Vec3& a : big.aux) a = cfg.p0 + 2.0 * (a - cfg.p0);
  for (Vec3& p : big.points) p = cfg.p0 + 2.0 * (p - cfg.p0);
  const auto a = invariants_oriented(cfg).values;
  const auto b = invariants_oriented(big).values;
  for (std::size_t j = 0; j < 3; ++j) CHECK(b[j] == doctest::Approx(2.0 * a[j]).epsilon(1e-12));
  for (std::size_t j = 3; j < a.size(); ++j) CHECK(test::close(a[j], b[j], 1e-12));
}

TEST_CASE("base invariants are scale free") {
  std::mt19937_64 rng(32);
  const SceneConfig cfg = test::random_config(Variant::kBase, 6, rng);
  SceneConfig big = cfg;
  const Vec3 center(3, -1, 2);
  big.p0 = center + 3.5 * (cfg.p0 - center);
  for (Vec3& p : big.points) p = center + 3.5 * (p - center);
  const auto a = invariants_base(cfg).values;
  const auto b = invariants_base(big).values;
  for (std::size_t j = 0; j < a.size(); ++j) CHECK(test::close(a[j], b[j], 1e-12));
}

TEST_CASE("zoom invariants by hand") {
  const InvariantVector v = invariants_zoom(make(Variant::kZoom, {{1, 0, 0}}, {{1, 1, 0}}));
  REQUIRE(v.values.size() == 1);
  CHECK(v.values[0] == doctest::Approx(1.0));

  const InvariantVector on_axis =
      invariants_zoom(make(Variant::kZoom, {{0.5, 0, 0}}, {{2, 0, 0}}));
  CHECK(std::abs(on_axis.values[0]) < 1e-15);

  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  CHECK(code_of(make(Variant::kZoom, {{golden, 0, 0}}, {{1, 1, 0}})) ==
        ErrorCode::kSingularFocalFactor);
}

TEST_CASE("invariance under the group actions") {
  std::mt19937_64 rng(33);
  for (Variant v : {Variant::kBase, Variant::kOriented, Variant::kZoom}) {
    for (int k = 0; k < 200; ++k) {
      const SceneConfig cfg = test::random_config(v, 5, rng);
      const GroupElement g = random_element(v, 5, 5000 + k, 1.0);
      SceneConfig moved;
      try {
        moved = apply(g, cfg);
      } catch (const Error& e) {
        // Zoom elements pushing m past the focal root are outside the action.
        REQUIRE(e.code() == ErrorCode::kSingularFocalFactor);
        continue;
      }
      const auto a = evaluate_invariants(cfg).values;
      const auto b = evaluate_invariants(moved).values;
      for (std::size_t j = 0; j < a.size(); ++j) CHECK(test::close(a[j], b[j], 1e-9));
    }
  }
}

TEST_CASE("lengths and labels") {
  CHECK(InvariantVector::expected_length(Variant::kBase, 5) == 7);
  CHECK(InvariantVector::expected_length(Variant::kOriented, 3) == 9);
  CHECK(InvariantVector::expected_length(Variant::kZoom, 4) == 7);
  const auto labels = invariant_labels(Variant::kBase, 4);
  REQUIRE(labels.size() == 5);
  CHECK(labels[0] == "I2");
  CHECK(labels[4] == "J4");
  CHECK(invariant_labels(Variant::kOriented, 1).front() == "IL");
}

TEST_CASE("jacobian rank on generic configurations") {
  std::mt19937_64 rng(34);
  CHECK(invariant_jacobian_rank(test::random_config(Variant::kBase, 5, rng)) == 7);
  CHECK(invariant_jacobian_rank(test::random_config(Variant::kOriented, 3, rng)) == 9);
  CHECK(invariant_jacobian_rank(test::random_config(Variant::kZoom, 4, rng)) == 7);
}

TEST_CASE("zoom rank drops when the only ray lies on the axis") {
  // I1 = |a x v1| / ... has a cone point there; its gradient vanishes in
  // the symmetric difference quotient.
  const SceneConfig cfg = make(Variant::kZoom, {{0.5, 0, 0}}, {{2, 0, 0}});
  CHECK(invariant_jacobian_rank(cfg) == 0);
}
