#include "invsfm/solver.h"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <random>
#include <string>
#include <utility>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "invsfm/errors.h"
#include "invsfm/frames.h"

namespace invsfm {

namespace {

std::size_t camera_block(Variant variant) { return 3 * (1 + aux_count(variant)); }

std::size_t object_index(std::size_t i) { return 3 * i; }

std::size_t camera_index(Variant variant, std::size_t n, std::size_t tau) {
  return 3 * n + tau * camera_block(variant);
}

// Per picture: equations minus camera unknowns.
long surplus_per_picture(Variant variant, std::size_t n) {
  const long nn = static_cast<long>(n);
  switch (variant) {
    case Variant::kBase: return 2 * nn - 6;
    case Variant::kOriented: return 2 * nn - 6;
    case Variant::kZoom: return 2 * nn - 7;
  }
  return 0;
}

// The two vectors whose frame rotation defines the gauge orientation.
std::pair<Vec3, Vec3> gauge_frame_vectors(const SceneConfig& cfg) {
  switch (cfg.variant) {
    case Variant::kBase: return {cfg.points[0] - cfg.p0, cfg.points[1] - cfg.p0};
    case Variant::kOriented: return {cfg.aux[0] - cfg.p0, cfg.aux[1] - cfg.p0};
    case Variant::kZoom: return {cfg.aux[0] - cfg.p0, cfg.points[0] - cfg.p0};
  }
  return {};
}

double sign_of(double v) { return v < 0.0 ? -1.0 : 1.0; }

}  // namespace

std::size_t ReconstructionProblem::full_size() const {
  return 3 * n + t * camera_block(variant);
}

std::size_t ReconstructionProblem::residual_size() const {
  return InvariantVector::expected_length(variant, n) * t;
}

bool counting_condition(Variant variant, std::size_t n, std::size_t t) {
  if (n <= 3 || t == 0) return false;
  const long surplus = surplus_per_picture(variant, n);
  if (surplus <= 0) return false;
  return surplus * static_cast<long>(t) >= 3 * static_cast<long>(n) - 6;
}

ReconstructionProblem make_problem(const PictureTracks& pictures, Variant variant,
                                   const SolverOptions& options) {
  pictures.validate();
  ReconstructionProblem problem;
  problem.variant = variant;
  problem.n = pictures.n();
  problem.t = pictures.t();
  problem.options = options;

  if (!counting_condition(variant, problem.n, problem.t)) {
    const long surplus = surplus_per_picture(variant, problem.n);
    std::string msg = "n = " + std::to_string(problem.n) + ", t = " +
                      std::to_string(problem.t) + "; need n > 3 and t >= (3n-6)/(" +
                      (variant == Variant::kZoom ? "2n-7" : "2n-6") + ")";
    if (problem.n > 3 && surplus > 0) {
      const long need = (3 * static_cast<long>(problem.n) - 6 + surplus - 1) / surplus;
      msg += " = " + std::to_string(need);
    }
    throw Error(ErrorCode::kInsufficientData, msg);
  }

  SceneConfig first;
  for (std::size_t tau = 0; tau < problem.t; ++tau) {
    const SceneConfig cfg = embed_picture(pictures.pictures[tau], variant, pictures.bounds);
    try {
      problem.targets.push_back(evaluate_invariants(cfg));
    } catch (const Error& e) {
      throw Error(ErrorCode::kDegenerateTargets,
                  "picture " + std::to_string(tau + 1) + ": " + e.what());
    }
    if (tau == 0) first = cfg;
  }

  Mat3 rot;
  try {
    const auto [a, b] = gauge_frame_vectors(first);
    rot = frame_rotation(a, b).rotation;
  } catch (const Error& e) {
    throw Error(ErrorCode::kDegenerateTargets, std::string("picture 1: ") + e.what());
  }
  const double o1_sign = sign_of((rot * (first.points[0] - first.p0)).x());

  const std::size_t n = problem.n;
  const std::size_t c0 = camera_index(variant, n, 0);
  std::vector<std::pair<std::size_t, double>> fixed = {{c0, 0.0}, {c0 + 1, 0.0}, {c0 + 2, 0.0}};
  GaugeSpec& gauge = problem.gauge;
  switch (variant) {
    case Variant::kBase:
      fixed.insert(fixed.end(), {{object_index(0), 1.0},
                                 {object_index(0) + 1, 0.0},
                                 {object_index(0) + 2, 0.0},
                                 {object_index(1) + 2, 0.0}});
      gauge.half_space_index = object_index(1) + 1;
      break;
    case Variant::kOriented:
      fixed.insert(fixed.end(), {{c0 + 4, 0.0},
                                 {c0 + 5, 0.0},
                                 {c0 + 8, 0.0},
                                 {object_index(0), o1_sign}});
      gauge.half_space_index = c0 + 7;
      break;
    case Variant::kZoom:
      fixed.insert(fixed.end(), {{c0 + 4, 0.0},
                                 {c0 + 5, 0.0},
                                 {object_index(0) + 2, 0.0},
                                 {object_index(0), o1_sign}});
      gauge.half_space_index = object_index(0) + 1;
      break;
  }
  std::sort(fixed.begin(), fixed.end());
  for (const auto& [index, value] : fixed) {
    gauge.fixed_indices.push_back(index);
    gauge.fixed_values.push_back(value);
  }
  return problem;
}

Eigen::VectorXd expand_unknowns(const ReconstructionProblem& problem,
                                const Eigen::VectorXd& free_unknowns) {
  if (static_cast<std::size_t>(free_unknowns.size()) != problem.free_size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "expected " + std::to_string(problem.free_size()) + " unknowns, got " +
                    std::to_string(free_unknowns.size()));
  }
  Eigen::VectorXd full(problem.full_size());
  const GaugeSpec& gauge = problem.gauge;
  std::size_t next_fixed = 0, next_free = 0;
  for (std::size_t k = 0; k < problem.full_size(); ++k) {
    if (next_fixed < gauge.size() && gauge.fixed_indices[next_fixed] == k) {
      full(k) = gauge.fixed_values[next_fixed++];
    } else {
      full(k) = free_unknowns(next_free++);
    }
  }
  return full;
}

Eigen::VectorXd reduce_unknowns(const ReconstructionProblem& problem,
                                const Eigen::VectorXd& full_unknowns) {
  if (static_cast<std::size_t>(full_unknowns.size()) != problem.full_size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "expected " + std::to_string(problem.full_size()) + " parameters, got " +
                    std::to_string(full_unknowns.size()));
  }
  Eigen::VectorXd out(problem.free_size());
  const GaugeSpec& gauge = problem.gauge;
  std::size_t next_fixed = 0, next_free = 0;
  for (std::size_t k = 0; k < problem.full_size(); ++k) {
    if (next_fixed < gauge.size() && gauge.fixed_indices[next_fixed] == k) {
      ++next_fixed;
    } else {
      out(next_free++) = full_unknowns(k);
    }
  }
  return out;
}

std::vector<SceneConfig> configurations(const ReconstructionProblem& problem,
                                        const Eigen::VectorXd& full) {
  const std::size_t n = problem.n;
  std::vector<Vec3> objects(n);
  for (std::size_t i = 0; i < n; ++i) objects[i] = full.segment<3>(object_index(i));

  std::vector<SceneConfig> out(problem.t);
  for (std::size_t tau = 0; tau < problem.t; ++tau) {
    const std::size_t c = camera_index(problem.variant, n, tau);
    SceneConfig& cfg = out[tau];
    cfg.variant = problem.variant;
    cfg.p0 = full.segment<3>(c);
    for (std::size_t a = 0; a < aux_count(problem.variant); ++a) {
      cfg.aux.push_back(full.segment<3>(c + 3 * (a + 1)));
    }
    cfg.points = objects;
  }
  return out;
}

Eigen::VectorXd assemble_residuals(const ReconstructionProblem& problem,
                                   const Eigen::VectorXd& free_unknowns) {
  const Eigen::VectorXd full = expand_unknowns(problem, free_unknowns);
  const std::vector<SceneConfig> cfgs = configurations(problem, full);
  const std::size_t per = InvariantVector::expected_length(problem.variant, problem.n);

  Eigen::VectorXd r(problem.residual_size());
  for (std::size_t tau = 0; tau < problem.t; ++tau) {
    InvariantVector values;
    try {
      values = evaluate_invariants(cfgs[tau]);
    } catch (const Error& e) {
      throw Error(ErrorCode::kEvaluationError,
                  "picture " + std::to_string(tau + 1) + ": " + e.what());
    }
    const std::vector<double>& target = problem.targets[tau].values;
    for (std::size_t k = 0; k < per; ++k) r(tau * per + k) = values.values[k] - target[k];
  }
  return r;
}

Eigen::VectorXd initialize(const ReconstructionProblem& problem, const PictureTracks& pictures,
                           std::uint64_t seed) {
  const std::size_t n = problem.n;
  const SolverOptions& opts = problem.options;
  std::vector<SceneConfig> embedded;
  for (const Picture& pic : pictures.pictures) {
    embedded.push_back(embed_picture(pic, problem.variant, pictures.bounds));
  }
  const auto [fa, fb] = gauge_frame_vectors(embedded[0]);
  const Mat3 rot = frame_rotation(fa, fb).rotation;

  Eigen::VectorXd full = Eigen::VectorXd::Zero(problem.full_size());
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 dir = (rot * embedded[0].points[i]).normalized();
    full.segment<3>(object_index(i)) =
        i == 0 ? Vec3(dir / std::abs(dir.x())) : Vec3(opts.initial_depth * dir);
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t tau = 0; tau < problem.t; ++tau) {
    Vec3 center = Vec3::Zero();
    if (tau > 0) {
      Vec3 dir(normal(rng), normal(rng), normal(rng));
      while (dir.norm() < 1e-12) dir = Vec3(normal(rng), normal(rng), normal(rng));
      center = opts.camera_perturbation * dir.normalized();
    }
    const std::size_t c = camera_index(problem.variant, n, tau);
    full.segment<3>(c) = center;
    for (std::size_t a = 0; a < embedded[tau].aux.size(); ++a) {
      full.segment<3>(c + 3 * (a + 1)) = center + rot * embedded[tau].aux[a];
    }
  }
  return reduce_unknowns(problem, full);
}

namespace {

struct RelativePose {
  Mat3 rotation = Mat3::Identity();  // picture-1 camera frame to this one
  Vec3 translation = Vec3::Zero();   // unit length
  int in_front = 0;
  double parallax = 0.0;             // median ray angle at the points
};

Vec3 bearing(const Observation& o) { return Vec3(1.0, o.u, o.v).normalized(); }

// Midpoint of the closest points of two rays; depths along each ray.
Vec3 triangulate(const Vec3& c1, const Vec3& d1, const Vec3& c2, const Vec3& d2, double* s1,
                 double* s2) {
  Eigen::Matrix<double, 3, 2> a;
  a.col(0) = d1;
  a.col(1) = -d2;
  const Eigen::Vector2d s = a.colPivHouseholderQr().solve(c2 - c1);
  *s1 = s(0);
  *s2 = s(1);
  return 0.5 * ((c1 + s(0) * d1) + (c2 + s(1) * d2));
}

std::optional<RelativePose> relative_pose(const std::vector<Vec3>& b1,
                                          const std::vector<Vec3>& b2) {
  const std::size_t n = b1.size();
  Eigen::MatrixXd a(n, 9);
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) a(i, 3 * j + k) = b2[i](j) * b1[i](k);
    }
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd_a(a, Eigen::ComputeFullV);
  const Eigen::VectorXd e = svd_a.matrixV().col(8);
  Mat3 ess;
  ess << e(0), e(1), e(2), e(3), e(4), e(5), e(6), e(7), e(8);

  const Eigen::JacobiSVD<Mat3> svd(ess, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU(), v = svd.matrixV();
  if (u.determinant() < 0.0) u = -u;
  if (v.determinant() < 0.0) v = -v;
  Mat3 w;
  w << 0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0;

  std::optional<RelativePose> best;
  for (const Mat3& rot : {Mat3(u * w * v.transpose()), Mat3(u * w.transpose() * v.transpose())}) {
    for (double sign : {1.0, -1.0}) {
      RelativePose pose;
      pose.rotation = rot;
      pose.translation = sign * u.col(2);
      const Vec3 c2 = -rot.transpose() * pose.translation;
      std::vector<double> angles;
      for (std::size_t i = 0; i < n; ++i) {
        const Vec3 d2 = rot.transpose() * b2[i];
        double s1 = 0.0, s2 = 0.0;
        triangulate(Vec3::Zero(), b1[i], c2, d2, &s1, &s2);
        if (s1 > 0.0 && s2 > 0.0) ++pose.in_front;
        angles.push_back(std::acos(std::clamp(b1[i].dot(d2), -1.0, 1.0)));
      }
      std::nth_element(angles.begin(), angles.begin() + n / 2, angles.end());
      pose.parallax = angles[n / 2];
      if (!best || pose.in_front > best->in_front) best = pose;
    }
  }
  return best;
}

}  // namespace

std::optional<Eigen::VectorXd> two_view_initialize(const ReconstructionProblem& problem,
                                                   const PictureTracks& pictures) {
  const std::size_t n = problem.n, t = problem.t;
  if (n < 8 || t < 2) return std::nullopt;
  std::vector<std::vector<Vec3>> bearings(t);
  for (std::size_t tau = 0; tau < t; ++tau) {
    for (const Observation& o : pictures.pictures[tau].observations) {
      bearings[tau].push_back(bearing(o));
    }
  }

  std::vector<RelativePose> poses(t);
  std::optional<std::size_t> reference;
  for (std::size_t tau = 1; tau < t; ++tau) {
    const auto pose = relative_pose(bearings[0], bearings[tau]);
    if (!pose) return std::nullopt;
    poses[tau] = *pose;
    if (pose->in_front == static_cast<int>(n) &&
        (!reference || pose->parallax > poses[*reference].parallax)) {
      reference = tau;
    }
  }
  if (!reference) return std::nullopt;

  const RelativePose& ref = poses[*reference];
  const Vec3 ref_center = -ref.rotation.transpose() * ref.translation;
  std::vector<Vec3> objects(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s1 = 0.0, s2 = 0.0;
    objects[i] = triangulate(Vec3::Zero(), bearings[0][i], ref_center,
                             ref.rotation.transpose() * bearings[*reference][i], &s1, &s2);
  }

  std::vector<SceneConfig> estimate(t);
  for (std::size_t tau = 0; tau < t; ++tau) {
    CameraPose cam;
    cam.rotation = poses[tau].rotation;
    cam.focal = pictures.pictures[tau].focal;
    if (tau > 0) {
      Mat3 lhs = Mat3::Zero();
      Vec3 rhs = Vec3::Zero();
      for (std::size_t i = 0; i < n; ++i) {
        const Vec3 d = cam.rotation.transpose() * bearings[tau][i];
        const Mat3 proj = Mat3::Identity() - d * d.transpose();
        lhs += proj;
        rhs += proj * objects[i];
      }
      cam.center = lhs.colPivHouseholderQr().solve(rhs);
    }
    Scene scene;
    scene.points = objects;
    estimate[tau] = true_configuration(scene, cam, problem.variant, pictures.bounds);
  }

  try {
    Eigen::VectorXd x = gauge_parameters(problem, estimate);
    if (!x.allFinite()) return std::nullopt;
    assemble_residuals(problem, x);
    return x;
  } catch (const Error&) {
    return std::nullopt;
  }
}

Eigen::VectorXd gauge_parameters(const ReconstructionProblem& problem,
                                 const std::vector<SceneConfig>& truth) {
  if (truth.size() != problem.t) {
    throw Error(ErrorCode::kLengthMismatch, "one configuration per picture expected");
  }
  const SceneConfig& first = truth[0];
  const Vec3 origin = first.p0;
  const auto [fa, fb] = gauge_frame_vectors(first);
  const Mat3 rot = frame_rotation(fa, fb).rotation;
  const Vec3 o1 = rot * (first.points[0] - origin);
  const double scale =
      problem.variant == Variant::kBase ? 1.0 / o1.norm() : 1.0 / std::abs(o1.x());

  Eigen::VectorXd full(problem.full_size());
  for (std::size_t i = 0; i < problem.n; ++i) {
    full.segment<3>(object_index(i)) = scale * (rot * (first.points[i] - origin));
  }
  for (std::size_t tau = 0; tau < problem.t; ++tau) {
    const std::size_t c = camera_index(problem.variant, problem.n, tau);
    const Vec3 center = scale * (rot * (truth[tau].p0 - origin));
    full.segment<3>(c) = center;
    for (std::size_t a = 0; a < truth[tau].aux.size(); ++a) {
      full.segment<3>(c + 3 * (a + 1)) = center + rot * (truth[tau].aux[a] - truth[tau].p0);
    }
  }
  return reduce_unknowns(problem, full);
}

namespace {

struct StartOutcome {
  bool ok = false;
  double cost = std::numeric_limits<double>::infinity();
  LmResult lm;
  std::string error;
};

StartOutcome run_start(const ReconstructionProblem& problem, const PictureTracks& pictures,
                       std::size_t index) {
  StartOutcome out;
  try {
    std::optional<Eigen::VectorXd> x0;
    if (index == 0 && problem.options.two_view_start) x0 = two_view_initialize(problem, pictures);
    if (!x0) x0 = initialize(problem, pictures, problem.options.seed + index);
    ResidualFn fn = [&problem](const Eigen::VectorXd& x) -> std::optional<Eigen::VectorXd> {
      try {
        return assemble_residuals(problem, x);
      } catch (const Error&) {
        return std::nullopt;
      }
    };
    out.lm = levenberg_marquardt(fn, *x0, problem.options);
    out.cost = 0.5 * out.lm.residuals.squaredNorm();
    out.ok = true;
  } catch (const Error& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace

ReconstructionResult solve(const ReconstructionProblem& problem, const PictureTracks& pictures) {
  const std::size_t starts = static_cast<std::size_t>(std::max(1, problem.options.multistart));
  std::vector<std::future<StartOutcome>> jobs;
  for (std::size_t k = 0; k < starts; ++k) {
    jobs.push_back(std::async(std::launch::async, run_start, std::cref(problem),
                              std::cref(pictures), k));
  }
  std::vector<StartOutcome> outcomes;
  for (auto& job : jobs) outcomes.push_back(job.get());

  ReconstructionResult result;
  result.variant = problem.variant;
  std::size_t best = starts;
  for (std::size_t k = 0; k < starts; ++k) {
    result.start_costs.push_back(outcomes[k].cost);
    if (outcomes[k].ok && (best == starts || outcomes[k].cost < outcomes[best].cost)) best = k;
  }
  if (best == starts) {
    throw Error(ErrorCode::kEvaluationError, "every start failed: " + outcomes[0].error);
  }

  const LmResult& lm = outcomes[best].lm;
  Eigen::VectorXd full = expand_unknowns(problem, lm.x);
  if (full(problem.gauge.half_space_index) < 0.0) {
    // Half turn about x: keeps every pinned coordinate and every invariant.
    for (Eigen::Index k = 0; k < full.size(); k += 3) {
      full(k + 1) = -full(k + 1);
      full(k + 2) = -full(k + 2);
    }
  }
  const Eigen::VectorXd x = reduce_unknowns(problem, full);

  result.best_start = best;
  result.residuals = assemble_residuals(problem, x);
  result.residual_rms =
      result.residuals.size() ? std::sqrt(result.residuals.squaredNorm() /
                                          static_cast<double>(result.residuals.size()))
                              : 0.0;
  result.iterations = lm.diagnostics.iterations;
  result.converged = lm.diagnostics.converged;
  result.termination = lm.diagnostics.termination;

  const std::vector<SceneConfig> cfgs = configurations(problem, full);
  result.object_points = cfgs[0].points;
  for (const SceneConfig& cfg : cfgs) result.cameras.push_back({cfg.p0, cfg.aux});
  return result;
}

ReconstructionResult reconstruct(const PictureTracks& pictures, Variant variant,
                                 const SolverOptions& options) {
  const ReconstructionProblem problem = make_problem(pictures, variant, options);
  return solve(problem, pictures);
}

}  // namespace invsfm
