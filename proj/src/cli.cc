#include "invsfm/cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "invsfm/io.h"
#include "invsfm/rotation_test.h"
#include "invsfm/solver.h"
#include "invsfm/synth.h"

namespace invsfm {

ExitCode exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParseError:
    case ErrorCode::kLengthMismatch:
    case ErrorCode::kVariantMismatch:
      return kExitUsage;
    case ErrorCode::kInsufficientData:
      return kExitInsufficientData;
    default:
      return kExitDegenerate;
  }
}

namespace {

struct SynthArgs {
  std::size_t n = 8;
  std::size_t t = 4;
  std::string kind = "orbit";
  double sigma = 0.0;
  std::uint64_t seed = 1;
  std::string variant = "base";
  double focal = 1.0;
  double focal_spread = 0.0;
  std::string out = "synth";
};

struct InvariantsArgs {
  std::string tracks;
  std::string variant;
  std::string out;
};

struct RotationArgs {
  std::string tracks;
  std::size_t tau_a = 1;
  std::size_t tau_b = 2;
  double tol = kDefaultRotationTolerance;
  std::string out;
};

struct ReconstructArgs {
  std::string tracks;
  std::string variant;
  int multistart = 1;
  std::uint64_t seed = 0;
  int max_iter = 200;
  std::string out = "reconstruction";
};

struct EvaluateArgs {
  std::string reconstruction;
  std::string truth;
  std::string out;
};

std::ofstream open_output(const std::string& path) {
  std::ofstream file(path);
  if (!file) throw Error(ErrorCode::kParseError, "cannot write '" + path + "'");
  return file;
}

// Report to a file when a path is given, else to `out`.
void emit(const Report& report, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    write_report(out, report);
  } else {
    auto file = open_output(path);
    write_report(file, report);
  }
}

// Coincident image points make every ray-based invariant of the picture
// meaningless.
void require_distinct_points(const PictureTracks& tracks) {
  for (std::size_t tau = 0; tau < tracks.t(); ++tau) {
    const auto& obs = tracks.pictures[tau].observations;
    for (std::size_t i = 0; i < obs.size(); ++i) {
      for (std::size_t j = i + 1; j < obs.size(); ++j) {
        if (obs[i].u == obs[j].u && obs[i].v == obs[j].v) {
          throw Error(ErrorCode::kDegenerateConfiguration,
                      "picture " + std::to_string(tau + 1) + ": points " +
                          std::to_string(obs[i].point_id) + " and " +
                          std::to_string(obs[j].point_id) + " coincide");
        }
      }
    }
  }
}

std::vector<double> config_row(double lead, const Vec3& p) { return {lead, p.x(), p.y(), p.z()}; }

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  TrajectoryParams params;
  params.focal = a.focal;
  params.focal_spread = a.focal_spread;
  const SyntheticSequence seq = synthesize(a.n, a.t, parse_trajectory_kind(a.kind), a.sigma,
                                           a.seed, parse_variant(a.variant), params);
  {
    auto file = open_output(a.out + "_scene.csv");
    write_scene(file, seq.scene.points);
  }
  {
    auto file = open_output(a.out + "_tracks.csv");
    write_tracks(file, seq.tracks);
  }
  {
    std::vector<Vec3> centers;
    for (const CameraPose& pose : seq.poses) centers.push_back(pose.center);
    auto file = open_output(a.out + "_cameras.csv");
    write_scene(file, centers);
  }
  out << "wrote " << a.out << "_scene.csv, " << a.out << "_tracks.csv, " << a.out
      << "_cameras.csv (" << a.n * a.t << " observations)\n";
  return kExitOk;
}

int cmd_invariants(const InvariantsArgs& a, std::ostream& out) {
  const PictureTracks tracks = load_tracks(a.tracks);
  require_distinct_points(tracks);
  const Variant variant = a.variant.empty() ? tracks.variant : parse_variant(a.variant);

  Report report;
  report.set("command", "invariants");
  report.set("variant", std::string(to_string(variant)));
  report.set("n", std::to_string(tracks.n()));
  report.set("t", std::to_string(tracks.t()));
  report.set("per_picture", std::to_string(InvariantVector::expected_length(variant, tracks.n())));

  ReportTable table;
  table.name = "invariants";
  table.columns = {"tau"};
  for (const std::string& label : invariant_labels(variant, tracks.n())) {
    table.columns.push_back(label);
  }
  for (std::size_t tau = 0; tau < tracks.t(); ++tau) {
    InvariantVector v;
    try {
      v = evaluate_invariants(embed_picture(tracks.pictures[tau], variant, tracks.bounds));
    } catch (const Error& e) {
      throw Error(e.code(), "picture " + std::to_string(tau + 1) + ": " + e.detail());
    }
    std::vector<double> row = {static_cast<double>(tau + 1)};
    row.insert(row.end(), v.values.begin(), v.values.end());
    table.rows.push_back(std::move(row));
  }
  report.tables.push_back(std::move(table));
  emit(report, a.out, out);
  return kExitOk;
}

int cmd_detect_rotation(const RotationArgs& a, std::ostream& out) {
  const PictureTracks tracks = load_tracks(a.tracks);
  for (std::size_t tau : {a.tau_a, a.tau_b}) {
    if (tau < 1 || tau > tracks.t()) {
      throw Error(ErrorCode::kParseError,
                  "picture " + std::to_string(tau) + " outside 1.." + std::to_string(tracks.t()));
    }
  }
  require_distinct_points(tracks);
  auto base_invariants = [&](std::size_t tau) {
    try {
      return invariants_base(
          embed_picture(tracks.pictures[tau - 1], Variant::kBase, tracks.bounds));
    } catch (const Error& e) {
      throw Error(e.code(), "picture " + std::to_string(tau) + ": " + e.detail());
    }
  };
  const RotationVerdict verdict =
      detect_pure_rotation(base_invariants(a.tau_a), base_invariants(a.tau_b), a.tol);

  Report report;
  report.set("command", "detect-rotation");
  report.set("tau_a", std::to_string(a.tau_a));
  report.set("tau_b", std::to_string(a.tau_b));
  report.set("tol", a.tol);
  report.set("verdict", verdict.is_pure_rotation ? "pure_rotation" : "not_pure_rotation");
  report.set("max_abs_deviation", verdict.max_abs_deviation);
  ReportTable table;
  table.name = "deviations";
  table.columns = {"index"};
  for (const std::string& label : invariant_labels(Variant::kBase, tracks.n())) {
    table.columns.push_back(label);
  }
  std::vector<double> row = {1.0};
  row.insert(row.end(), verdict.per_invariant_deviations.begin(),
             verdict.per_invariant_deviations.end());
  table.rows.push_back(std::move(row));
  report.tables.push_back(std::move(table));
  emit(report, a.out, out);
  return verdict.is_pure_rotation ? kExitOk : kExitNotRotation;
}

int cmd_reconstruct(const ReconstructArgs& a, std::ostream& out) {
  const PictureTracks tracks = load_tracks(a.tracks);
  require_distinct_points(tracks);
  const Variant variant = a.variant.empty() ? tracks.variant : parse_variant(a.variant);

  SolverOptions opts;
  opts.multistart = a.multistart;
  opts.seed = a.seed;
  opts.max_iterations = a.max_iter;
  const ReconstructionProblem problem = make_problem(tracks, variant, opts);
  const ReconstructionResult result = solve(problem, tracks);

  Report report;
  report.set("command", "reconstruct");
  report.set("variant", std::string(to_string(variant)));
  report.set("n", std::to_string(problem.n));
  report.set("t", std::to_string(problem.t));
  report.set("equations", std::to_string(problem.residual_size()));
  report.set("unknowns", std::to_string(problem.free_size()));
  report.set("multistart", std::to_string(opts.multistart));
  report.set("seed", std::to_string(opts.seed));
  report.set("best_start", std::to_string(result.best_start + 1));
  report.set("converged", result.converged ? "true" : "false");
  report.set("termination", std::string(to_string(result.termination)));
  report.set("iterations", std::to_string(result.iterations));
  report.set("residual_rms", result.residual_rms);
  report.set("residual_max", result.residuals.size() ? result.residuals.lpNorm<Eigen::Infinity>()
                                                     : 0.0);

  ReportTable points{"object_points", {"point_id", "x", "y", "z"}, {}};
  for (std::size_t i = 0; i < result.object_points.size(); ++i) {
    points.rows.push_back(config_row(static_cast<double>(i + 1), result.object_points[i]));
  }
  ReportTable cameras{"cameras", {"tau", "x", "y", "z"}, {}};
  for (std::size_t k = 0; k < aux_count(variant); ++k) {
    const std::string prefix = variant == Variant::kZoom ? "pm" : (k == 0 ? "pl" : "pu");
    for (const char* axis : {"_x", "_y", "_z"}) cameras.columns.push_back(prefix + axis);
  }
  for (std::size_t tau = 0; tau < result.cameras.size(); ++tau) {
    std::vector<double> row = config_row(static_cast<double>(tau + 1), result.cameras[tau].center);
    for (const Vec3& p : result.cameras[tau].aux) row.insert(row.end(), {p.x(), p.y(), p.z()});
    cameras.rows.push_back(std::move(row));
  }
  ReportTable residuals{"residuals", {"tau"}, {}};
  for (const std::string& label : invariant_labels(variant, problem.n)) {
    residuals.columns.push_back(label);
  }
  const std::size_t per = InvariantVector::expected_length(variant, problem.n);
  for (std::size_t tau = 0; tau < problem.t; ++tau) {
    std::vector<double> row = {static_cast<double>(tau + 1)};
    for (std::size_t k = 0; k < per; ++k) row.push_back(result.residuals(tau * per + k));
    residuals.rows.push_back(std::move(row));
  }
  report.tables = {std::move(points), std::move(cameras), std::move(residuals)};

  std::vector<Vec3> centers;
  for (const CameraUnknowns& c : result.cameras) centers.push_back(c.center);
  emit(report, a.out + "_report.txt", out);
  {
    auto file = open_output(a.out + "_points.csv");
    write_scene(file, result.object_points);
  }
  {
    auto file = open_output(a.out + "_cameras.csv");
    write_scene(file, centers);
  }
  {
    auto file = open_output(a.out + "_views.svg");
    write_views_svg(file, result.object_points, centers);
  }
  out << (result.converged ? "converged" : "not converged") << ", residual_rms "
      << format_double(result.residual_rms) << ", iterations " << result.iterations << "\n";
  return result.converged ? kExitOk : kExitNotConverged;
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const SceneFile recon = load_scene(a.reconstruction);
  const SceneFile truth = load_scene(a.truth);
  std::vector<Vec3> source, target;
  for (std::size_t i = 0; i < truth.ids.size(); ++i) {
    const auto it = std::find(recon.ids.begin(), recon.ids.end(), truth.ids[i]);
    if (it == recon.ids.end()) {
      throw Error(ErrorCode::kParseError,
                  "point_id " + std::to_string(truth.ids[i]) + " missing from the reconstruction");
    }
    source.push_back(recon.points[it - recon.ids.begin()]);
    target.push_back(truth.points[i]);
  }
  if (recon.ids.size() != truth.ids.size()) {
    throw Error(ErrorCode::kParseError, "reconstruction and truth hold different point ids");
  }
  const Alignment al = align_similarity(source, target);
  const double diam = diameter(target);

  Report report;
  report.set("command", "evaluate");
  report.set("points", std::to_string(target.size()));
  report.set("scale", al.transform.scale);
  report.set("rms_error", al.rms_error);
  report.set("diameter", diam);
  report.set("rms_relative", diam > 0.0 ? al.rms_error / diam : 0.0);
  ReportTable errors{"errors", {"point_id", "error"}, {}};
  for (std::size_t i = 0; i < source.size(); ++i) {
    errors.rows.push_back({static_cast<double>(truth.ids[i]),
                           (al.transform(source[i]) - target[i]).norm()});
  }
  report.tables.push_back(std::move(errors));
  emit(report, a.out, out);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reconstruction from pictures through joint invariants"};
  app.require_subcommand(1);
  const std::vector<std::string> variants = {"base", "oriented", "zoom"};

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "synthetic scene, trajectory and tracks");
  s->add_option("--n", synth.n, "object points")->check(CLI::PositiveNumber);
  s->add_option("--t", synth.t, "pictures")->check(CLI::PositiveNumber);
  s->add_option("--kind", synth.kind, "orbit | translation | pure_rotation")
      ->check(CLI::IsMember({"orbit", "translation", "pure_rotation"}));
  s->add_option("--sigma", synth.sigma, "image noise")->check(CLI::NonNegativeNumber);
  s->add_option("--seed", synth.seed);
  s->add_option("--variant", synth.variant)->check(CLI::IsMember(variants));
  s->add_option("--focal", synth.focal)->check(CLI::PositiveNumber);
  s->add_option("--focal-spread", synth.focal_spread, "per-picture focal jitter")
      ->check(CLI::Range(0.0, 0.9));
  s->add_option("--out", synth.out, "output prefix");

  InvariantsArgs inv;
  auto* i = app.add_subcommand("invariants", "per-picture invariant vectors");
  i->add_option("tracks", inv.tracks)->required();
  i->add_option("--variant", inv.variant, "defaults to the tracks header")
      ->check(CLI::IsMember(variants));
  i->add_option("--out", inv.out, "report path (default stdout)");

  RotationArgs rot;
  auto* d = app.add_subcommand("detect-rotation", "pure-rotation test between two pictures");
  d->add_option("tracks", rot.tracks)->required();
  d->add_option("--tau-a", rot.tau_a)->check(CLI::PositiveNumber);
  d->add_option("--tau-b", rot.tau_b)->check(CLI::PositiveNumber);
  d->add_option("--tol", rot.tol)->check(CLI::NonNegativeNumber);
  d->add_option("--out", rot.out, "report path (default stdout)");

  ReconstructArgs rec;
  auto* r = app.add_subcommand("reconstruct", "solve for object points and cameras");
  r->add_option("tracks", rec.tracks)->required();
  r->add_option("--variant", rec.variant, "defaults to the tracks header")
      ->check(CLI::IsMember(variants));
  r->add_option("--multistart", rec.multistart)->check(CLI::PositiveNumber);
  r->add_option("--seed", rec.seed);
  r->add_option("--max-iter", rec.max_iter)->check(CLI::PositiveNumber);
  r->add_option("--out", rec.out, "output prefix");

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "similarity-aligned error against a ground-truth scene");
  e->add_option("reconstruction", ev.reconstruction)->required();
  e->add_option("truth", ev.truth)->required();
  e->add_option("--out", ev.out, "report path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& pe) {
    const int code = app.exit(pe, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (s->parsed()) return cmd_synth(synth, out);
    if (i->parsed()) return cmd_invariants(inv, out);
    if (d->parsed()) return cmd_detect_rotation(rot, out);
    if (r->parsed()) return cmd_reconstruct(rec, out);
    if (e->parsed()) return cmd_evaluate(ev, out);
  } catch (const Error& ex) {
    err << "error: " << ex.what() << '\n';
    return exit_code_for(ex.code());
  }
  return kExitUsage;
}

}  // namespace invsfm
