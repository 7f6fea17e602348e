#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/SVD>

#include "invsfm/errors.h"
#include "invsfm/solver.h"

using namespace invsfm;

namespace {

std::vector<SceneConfig> truth_configs(const SyntheticSequence& seq, Variant v) {
  std::vector<SceneConfig> out;
  for (const CameraPose& pose : seq.poses) {
    out.push_back(true_configuration(seq.scene, pose, v, seq.tracks.bounds));
  }
  return out;
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

TEST_CASE("counting condition") {
  CHECK_FALSE(counting_condition(Variant::kBase, 3, 100));
  CHECK_FALSE(counting_condition(Variant::kBase, 4, 2));
  CHECK(counting_condition(Variant::kBase, 4, 3));
  CHECK(counting_condition(Variant::kBase, 5, 3));
  CHECK_FALSE(counting_condition(Variant::kBase, 5, 2));
  CHECK(counting_condition(Variant::kBase, 8, 2));
  CHECK(counting_condition(Variant::kOriented, 4, 3));
  CHECK_FALSE(counting_condition(Variant::kZoom, 4, 5));
  CHECK(counting_condition(Variant::kZoom, 4, 6));
}

TEST_CASE("residual length") {
  const SyntheticSequence seq = synthesize(4, 3, TrajectoryKind::kOrbit, 0.0, 2);
  const ReconstructionProblem p = make_problem(seq.tracks, Variant::kBase);
  CHECK(p.residual_size() == 15);
  const Eigen::VectorXd x0 = initialize(p, seq.tracks, 0);
  CHECK(x0.size() == static_cast<Eigen::Index>(p.free_size()));
  CHECK(assemble_residuals(p, x0).size() == 15);
  CHECK(code_of([&] { assemble_residuals(p, Eigen::VectorXd::Zero(3)); }) ==
        ErrorCode::kLengthMismatch);
}

TEST_CASE("insufficient data") {
  const SyntheticSequence seq = synthesize(4, 1, TrajectoryKind::kOrbit, 0.0, 2);
  try {
    reconstruct(seq.tracks, Variant::kBase);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInsufficientData);
    CHECK(std::string(e.what()).find("n > 3") != std::string::npos);
  }
}

TEST_CASE("residuals vanish at the true configuration") {
  for (Variant v : {Variant::kBase, Variant::kOriented, Variant::kZoom}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      TrajectoryParams params;
      if (v == Variant::kZoom) params.focal_spread = 0.3;
      const SyntheticSequence seq = synthesize(8, 4, TrajectoryKind::kOrbit, 0.0, seed, v, params);
      const ReconstructionProblem p = make_problem(seq.tracks, v);
      const Eigen::VectorXd x = gauge_parameters(p, truth_configs(seq, v));
      const Eigen::VectorXd r = assemble_residuals(p, x);
      CHECK(r.lpNorm<Eigen::Infinity>() < 1e-10);

      // Gauge round trip.
      CHECK((reduce_unknowns(p, expand_unknowns(p, x)) - x).norm() == 0.0);

      // Smoothness: a small perturbation of one object point moves r by O(delta).
      Eigen::VectorXd full = expand_unknowns(p, x);
      full[7] += 1e-6;  // O_3.y, free in every gauge
      const Eigen::VectorXd r2 = assemble_residuals(p, reduce_unknowns(p, full));
      CHECK((r2 - r).norm() < 1e-3);
      CHECK((r2 - r).norm() > 0.0);
    }
  }
}

TEST_CASE("gauge leaves no null directions") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SyntheticSequence seq = synthesize(6, 3, TrajectoryKind::kOrbit, 0.0, seed);
    const ReconstructionProblem p = make_problem(seq.tracks, Variant::kBase);
    const Eigen::VectorXd x = gauge_parameters(p, truth_configs(seq, Variant::kBase));
    const ResidualFn fn = [&](const Eigen::VectorXd& y) -> std::optional<Eigen::VectorXd> {
      return assemble_residuals(p, y);
    };
    const Eigen::MatrixXd j = finite_difference_jacobian(fn, x, assemble_residuals(p, x), 1e-7);
    const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXd>(j).singularValues();
    CHECK(s.minCoeff() > 1e-6 * s.maxCoeff());
  }
}

TEST_CASE("initialization") {
  const SyntheticSequence seq = synthesize(8, 4, TrajectoryKind::kOrbit, 0.0, 4);
  const ReconstructionProblem p = make_problem(seq.tracks, Variant::kBase);
  CHECK(initialize(p, seq.tracks, 7) == initialize(p, seq.tracks, 7));

  // Object points on the picture-1 rays through the gauge origin.
  const Eigen::VectorXd full = expand_unknowns(p, initialize(p, seq.tracks, 7));
  const auto cfgs = configurations(p, full);
  // The initial points span the same bundle of rays as the picture, up to
  // one rotation: every pairwise ray angle is preserved.
  const SceneConfig ray_cfg = embed_picture(seq.tracks.pictures[0], Variant::kBase);
  for (std::size_t i = 0; i < 8; ++i) {
    for (std::size_t j = i + 1; j < 8; ++j) {
      const double a = cfgs[0].points[i].normalized().dot(cfgs[0].points[j].normalized());
      const double b = ray_cfg.points[i].normalized().dot(ray_cfg.points[j].normalized());
      CHECK(std::abs(a - b) < 1e-12);
    }
  }

  // Five starts, five different camera draws.
  std::vector<Eigen::VectorXd> starts;
  for (std::uint64_t k = 0; k < 5; ++k) starts.push_back(initialize(p, seq.tracks, k));
  for (std::size_t a = 0; a < 5; ++a) {
    for (std::size_t b = a + 1; b < 5; ++b) CHECK((starts[a] - starts[b]).norm() > 0.0);
  }
}

TEST_CASE("noiseless base reconstruction") {
  const SyntheticSequence seq = synthesize(8, 4, TrajectoryKind::kOrbit, 0.0, 1);
  const ReconstructionResult res = reconstruct(seq.tracks, Variant::kBase);
  CHECK(res.converged);
  CHECK(res.residual_rms < 1e-8);
  const Alignment al = align_similarity(res.object_points, seq.scene.points);
  CHECK(al.rms_error < 1e-4 * seq.scene.diameter);
  // Gauge values hold exactly.
  CHECK(res.cameras[0].center.norm() == 0.0);
  CHECK(res.object_points[0] == Vec3(1, 0, 0));
  CHECK(res.object_points[1].y() >= 0.0);
}

TEST_CASE("multistart keeps every start cost") {
  const SyntheticSequence seq = synthesize(8, 4, TrajectoryKind::kOrbit, 0.0, 2);
  SolverOptions opts;
  opts.multistart = 3;
  const ReconstructionResult res = reconstruct(seq.tracks, Variant::kBase, opts);
  REQUIRE(res.start_costs.size() == 3);
  for (double c : res.start_costs) CHECK(c >= res.start_costs[res.best_start]);
}
