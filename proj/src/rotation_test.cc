#include "invsfm/rotation_test.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "invsfm/errors.h"

namespace invsfm {

RotationVerdict detect_pure_rotation(const InvariantVector& view_a,
                                     const InvariantVector& view_b, double tol) {
  if (view_a.variant != Variant::kBase || view_b.variant != Variant::kBase) {
    throw Error(ErrorCode::kVariantMismatch,
                "pure-rotation test compares base invariants");
  }
  if (view_a.n != view_b.n || view_a.values.size() != view_b.values.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "views have " + std::to_string(view_a.n) + " and " +
                    std::to_string(view_b.n) + " points");
  }
  if (!(tol > 0.0)) {
    throw Error(ErrorCode::kInvalidConfiguration, "tolerance must be positive");
  }

  RotationVerdict out;
  out.per_invariant_deviations.resize(view_a.values.size());
  for (std::size_t k = 0; k < view_a.values.size(); ++k) {
    const double d = std::abs(view_a.values[k] - view_b.values[k]);
    out.per_invariant_deviations[k] = d;
    out.max_abs_deviation = std::max(out.max_abs_deviation, d);
  }
  out.is_pure_rotation = out.max_abs_deviation <= tol;
  return out;
}

}  // namespace invsfm
