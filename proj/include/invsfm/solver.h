#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "invsfm/groups.h"
#include "invsfm/invariants.h"
#include "invsfm/lm.h"
#include "invsfm/synth.h"

namespace invsfm {

// Full parameter layout: O_1..O_n, then per picture P0^tau followed by its
// auxiliary points (corners or principal point). Gauge-fixed entries are
// removed from the vector LM works on.
//
// Fixed scalars (7 for every variant):
//   kBase      P0^1 = 0, O_1 = (1, 0, 0), O_2.z = 0
//   kOriented  P0^1 = 0, P_L^1.y = P_L^1.z = 0, P^L^1.z = 0, O_1.x = +-1
//   kZoom      P0^1 = 0, P_M^1.y = P_M^1.z = 0, O_1.z = 0, O_1.x = +-1
// The remaining discrete ambiguity (a half turn about x) is removed after
// solving by making `half_space_index` non-negative.
struct GaugeSpec {
  std::vector<std::size_t> fixed_indices;  // ascending
  std::vector<double> fixed_values;
  std::size_t half_space_index = 0;

  std::size_t size() const { return fixed_indices.size(); }
};

struct ReconstructionProblem {
  Variant variant = Variant::kBase;
  std::size_t n = 0;
  std::size_t t = 0;
  InvariantTargets targets;
  GaugeSpec gauge;
  SolverOptions options;

  std::size_t full_size() const;
  std::size_t free_size() const { return full_size() - gauge.size(); }
  std::size_t residual_size() const;
};

struct CameraUnknowns {
  Vec3 center = Vec3::Zero();
  std::vector<Vec3> aux;
};

struct ReconstructionResult {
  Variant variant = Variant::kBase;
  std::vector<Vec3> object_points;
  std::vector<CameraUnknowns> cameras;
  double residual_rms = 0.0;
  int iterations = 0;
  bool converged = false;
  Termination termination = Termination::kMaxIterations;
  Eigen::VectorXd residuals;
  std::size_t best_start = 0;
  std::vector<double> start_costs;  // final 0.5 |r|^2 of every start
};

// Equations per picture minus the camera unknowns per picture must cover
// the 3n - 6 object unknowns left after a rigid gauge: n > 3 and
// (e - k) t >= 3n - 6 with (e, k) = (2n-3, 3), (2n+3, 9), (2n-1, 6). For
// kBase this is t >= (3n - 6) / (2n - 6).
bool counting_condition(Variant variant, std::size_t n, std::size_t t);

// Embeds the pictures, evaluates the targets and fixes the gauge.
// Throws kInsufficientData and kDegenerateTargets.
ReconstructionProblem make_problem(const PictureTracks& pictures, Variant variant,
                                   const SolverOptions& options = {});

Eigen::VectorXd expand_unknowns(const ReconstructionProblem& problem,
                                const Eigen::VectorXd& free_unknowns);
Eigen::VectorXd reduce_unknowns(const ReconstructionProblem& problem,
                                const Eigen::VectorXd& full_unknowns);

// Per-picture configurations described by a full parameter vector.
std::vector<SceneConfig> configurations(const ReconstructionProblem& problem,
                                        const Eigen::VectorXd& full_unknowns);

// I(unknowns) - target, pictures outer, invariant order inner. Throws
// kLengthMismatch and kEvaluationError (naming picture and cause).
Eigen::VectorXd assemble_residuals(const ReconstructionProblem& problem,
                                   const Eigen::VectorXd& free_unknowns);

// Starting point: object points on the picture-1 rays (O_1 at the pinned
// scale, the others at options.initial_depth), picture-1 camera at the
// origin, other cameras at the origin plus a seeded offset of length
// options.camera_perturbation, auxiliary points at each picture's own
// embedded offsets in the picture-1 orientation.
Eigen::VectorXd initialize(const ReconstructionProblem& problem, const PictureTracks& pictures,
                           std::uint64_t seed);

// Starting point from relative poses: essential matrix (eight-point) between
// picture 1 and every other picture, object points triangulated from the
// pair with the widest parallax, remaining centers by least squares on the
// rays. Needs n >= 8; returns nullopt when the estimate is unusable.
std::optional<Eigen::VectorXd> two_view_initialize(const ReconstructionProblem& problem,
                                                   const PictureTracks& pictures);

// Free parameter vector of a known camera-object system (one configuration
// per picture sharing the object points), moved into the gauge by a rigid
// motion and a scaling of centers and object points.
Eigen::VectorXd gauge_parameters(const ReconstructionProblem& problem,
                                 const std::vector<SceneConfig>& truth);

// Runs options.multistart independent starts (seeds options.seed + k) in
// parallel and keeps the lowest final cost, lowest start index on ties.
// A run that does not converge is returned with converged = false.
ReconstructionResult solve(const ReconstructionProblem& problem, const PictureTracks& pictures);

// make_problem + solve.
ReconstructionResult reconstruct(const PictureTracks& pictures, Variant variant,
                                 const SolverOptions& options = {});

}  // namespace invsfm
