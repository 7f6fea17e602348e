#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace invsfm {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline Vec3 cross(const Vec3& a, const Vec3& b) { return a.cross(b); }
inline double dot(const Vec3& a, const Vec3& b) { return a.dot(b); }
inline double norm(const Vec3& a) { return a.norm(); }

// True when ||M^T M - I||_inf < tol and det(M) > 0.
bool is_rotation(const Mat3& m, double tol = 1e-12);

// Rotation by `angle` radians about `axis` (need not be unit length).
Mat3 rotation_about_axis(const Vec3& axis, double angle);

// Rotation vector (axis * angle) of a rotation matrix.
Vec3 rotation_log(const Mat3& rotation);

// x -> scale * rotation * x + translation
struct SimilarityTransform {
  double scale = 1.0;
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 operator()(const Vec3& x) const {
    return scale * (rotation * x) + translation;
  }
};

struct Alignment {
  SimilarityTransform transform;
  double rms_error = 0.0;
};

// Least-squares similarity taking `source` onto `target` (closed form,
// SVD of the cross-covariance). Throws kDegenerateConfiguration when the
// lists differ in length, hold fewer than three points, or the source
// points are collinear or coincident.
Alignment align_similarity(std::span<const Vec3> source,
                           std::span<const Vec3> target);

// Maximum pairwise distance.
double diameter(std::span<const Vec3> points);

Vec3 centroid(std::span<const Vec3> points);

}  // namespace invsfm
