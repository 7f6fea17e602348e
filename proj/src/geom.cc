#include "invsfm/geom.h"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "invsfm/errors.h"

namespace invsfm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::kInvalidConfiguration: return "InvalidConfiguration";
    case ErrorCode::kRayOrthogonalToAxis: return "RayOrthogonalToAxis";
    case ErrorCode::kInvalidLambda: return "InvalidLambda";
    case ErrorCode::kDegenerateCrossSection: return "DegenerateCrossSection";
    case ErrorCode::kOrthogonalRays: return "OrthogonalRays";
    case ErrorCode::kCollinearBaseRays: return "CollinearBaseRays";
    case ErrorCode::kSingularFocalFactor: return "SingularFocalFactor";
    case ErrorCode::kVariantMismatch: return "VariantMismatch";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kEvaluationError: return "EvaluationError";
    case ErrorCode::kNonFiniteResidual: return "NonFiniteResidual";
    case ErrorCode::kInsufficientData: return "InsufficientData";
    case ErrorCode::kDegenerateTargets: return "DegenerateTargets";
    case ErrorCode::kPointBehindCamera: return "PointBehindCamera";
    case ErrorCode::kParseError: return "ParseError";
  }
  return "Unknown";
}

bool is_rotation(const Mat3& m, double tol) {
  if (!m.allFinite()) return false;
  const double orth = (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff();
  return orth < tol && m.determinant() > 0.0;
}

Mat3 rotation_about_axis(const Vec3& axis, double angle) {
  const double len = axis.norm();
  if (len == 0.0) return Mat3::Identity();
  return Eigen::AngleAxisd(angle, axis / len).toRotationMatrix();
}

Vec3 rotation_log(const Mat3& rotation) {
  const Eigen::AngleAxisd aa(rotation);
  return aa.angle() * aa.axis();
}

Alignment align_similarity(std::span<const Vec3> source,
                           std::span<const Vec3> target) {
  if (source.size() != target.size()) {
    throw Error(ErrorCode::kDegenerateConfiguration,
                "alignment needs equally long point lists (" +
                    std::to_string(source.size()) + " vs " +
                    std::to_string(target.size()) + ")");
  }
  const std::size_t n = source.size();
  if (n < 3) {
    throw Error(ErrorCode::kDegenerateConfiguration,
                "alignment needs at least three points");
  }

  const Vec3 mu_src = centroid(source);
  const Vec3 mu_tgt = centroid(target);
  Mat3 cov = Mat3::Zero();
  Mat3 src_scatter = Mat3::Zero();
  double src_var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 a = source[i] - mu_src;
    const Vec3 b = target[i] - mu_tgt;
    cov += b * a.transpose();
    src_scatter += a * a.transpose();
    src_var += a.squaredNorm();
  }
  cov /= static_cast<double>(n);
  src_scatter /= static_cast<double>(n);
  src_var /= static_cast<double>(n);

  // Rank of the source scatter decides collinearity independently of the
  // target, which may itself be degenerate.
  const Eigen::SelfAdjointEigenSolver<Mat3> scatter_eig(src_scatter);
  const Vec3 ev = scatter_eig.eigenvalues();  // ascending
  if (ev(2) <= 0.0 || ev(1) <= 1e-12 * ev(2)) {
    throw Error(ErrorCode::kDegenerateConfiguration,
                "source points are collinear or coincident");
  }

  const Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 s = Mat3::Identity();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) {
    s(2, 2) = -1.0;
  }

  Alignment out;
  out.transform.rotation = svd.matrixU() * s * svd.matrixV().transpose();
  out.transform.scale = svd.singularValues().dot(s.diagonal()) / src_var;
  out.transform.translation =
      mu_tgt - out.transform.scale * (out.transform.rotation * mu_src);

  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sq += (out.transform(source[i]) - target[i]).squaredNorm();
  }
  out.rms_error = std::sqrt(sq / static_cast<double>(n));
  return out;
}

double diameter(std::span<const Vec3> points) {
  double best = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      best = std::max(best, (points[i] - points[j]).norm());
    }
  }
  return best;
}

Vec3 centroid(std::span<const Vec3> points) {
  Vec3 c = Vec3::Zero();
  for (const Vec3& p : points) c += p;
  if (!points.empty()) c /= static_cast<double>(points.size());
  return c;
}

}  // namespace invsfm
