#pragma once

// Pinhole projection under the cylindrical surface model, and the
// small-depth-variation approximation of the vertical displacement a
// curved page induces in the image plane. The warp pipeline uses the
// displacement field directly; this module documents and sanity-checks
// that interpretation. Unit-agnostic: callers keep lengths consistent.

#include <stdexcept>

namespace docwarp {

struct ScenePoint {
  double x;
  double y;
  double z;  // depth along the optical axis, > 0
};

struct ImagePoint {
  double X;
  double Y;
};

inline ImagePoint project(const ScenePoint& p, double focal) {
  if (p.z <= 0.0) throw std::invalid_argument("project: point behind camera");
  if (focal <= 0.0) throw std::invalid_argument("project: focal length must be > 0");
  return {focal * p.x / p.z, focal * p.y / p.z};
}

/// Exact image-plane y-shift between a flat page at depth d0 and a curved
/// page at depth dx, for an object point at height y1.
inline double displacement_exact(double y1, double focal, double d0, double dx) {
  if (d0 <= 0.0 || dx <= 0.0)
    throw std::invalid_argument("displacement_exact: depths must be > 0");
  return focal * y1 * (d0 - dx) / (dx * d0);
}

/// First-order approximation: shift = Y1 * d / D0, with d the depth deviation.
inline double displacement_approx(double image_y1, double d, double d0) {
  if (d0 <= 0.0)
    throw std::invalid_argument("displacement_approx: depth must be > 0");
  return image_y1 * d / d0;
}

}  // namespace docwarp
