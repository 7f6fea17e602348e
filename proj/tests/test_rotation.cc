#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "invsfm/errors.h"
#include "invsfm/rotation_test.h"
#include "invsfm/synth.h"

using namespace invsfm;

namespace {

InvariantVector view(const Scene& scene, const CameraPose& pose) {
  return evaluate_invariants(embed_picture(project(scene, pose), Variant::kBase));
}

}  // namespace

TEST_CASE("rotation about the center keeps the invariants") {
  const Scene scene = generate_scene(8, 3);
  TrajectoryParams params;
  params.look_at = Vec3::Zero();
  const auto poses = generate_trajectory(2, TrajectoryKind::kPureRotation, params, 4);
  const RotationVerdict verdict =
      detect_pure_rotation(view(scene, poses[0]), view(scene, poses[1]));
  CHECK(verdict.is_pure_rotation);
  CHECK(verdict.max_abs_deviation < 1e-10);
  CHECK(verdict.per_invariant_deviations.size() == 13);
}

TEST_CASE("translated camera is detected") {
  const Scene scene = generate_scene(8, 5);
  TrajectoryParams params;
  const auto poses = generate_trajectory(1, TrajectoryKind::kPureRotation, params, 6);
  CameraPose moved = poses[0];
  moved.center += 0.2 * params.radius * Vec3(0, 1, 0);
  const RotationVerdict verdict = detect_pure_rotation(view(scene, poses[0]), view(scene, moved));
  CHECK_FALSE(verdict.is_pure_rotation);
  CHECK(verdict.max_abs_deviation > 1e-3);
}

TEST_CASE("a view compared with itself") {
  const Scene scene = generate_scene(6, 7);
  const auto poses = generate_trajectory(1, TrajectoryKind::kOrbit, {}, 8);
  const InvariantVector a = view(scene, poses[0]);
  const RotationVerdict verdict = detect_pure_rotation(a, a);
  CHECK(verdict.is_pure_rotation);
  CHECK(verdict.max_abs_deviation == 0.0);
}

TEST_CASE("mismatched inputs") {
  InvariantVector a{Variant::kBase, 4, std::vector<double>(5, 0.1)};
  InvariantVector b{Variant::kBase, 5, std::vector<double>(7, 0.1)};
  InvariantVector z{Variant::kZoom, 3, std::vector<double>(5, 0.1)};
  try {
    detect_pure_rotation(a, b);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kLengthMismatch);
  }
  try {
    detect_pure_rotation(a, z);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kVariantMismatch);
  }
}
