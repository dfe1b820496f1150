#pragma once

// Element distortion metrics and whole-mesh aggregates. Triangles score the
// Lee-Lo alpha (1 = equilateral, 0 = degenerate); quadrilaterals score the
// Hua lambda (1 = square, 0 = non-convex or three corners collinear). The
// aggregates are MQ (mean quality per element type) and MSE (RMS deviation
// from ideal quality 1).

#include <cmath>
#include <optional>
#include <vector>

#include "meshsmooth/core.hpp"

namespace meshsmooth {

/// alpha = 2*sqrt(3)*|CA x CB| / (|CA|^2 + |AB|^2 + |BC|^2), clamped to [0,1].
/// Works for 2D and 3D points; returns 0 for a fully degenerate input.
inline double tri_alpha(const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ca = a - c, cb = b - c, ab = b - a;
  const double denom = norm2(ca) + norm2(ab) + norm2(cb);
  if (denom == 0.0) return 0.0;
  // sqrt(3*|CA x CB|^2) keeps exactly representable cases exact.
  const double alpha = 2.0 * std::sqrt(3.0 * norm2(cross(ca, cb))) / denom;
  return std::clamp(alpha, 0.0, 1.0);
}

/// lambda = 2 * ((prod of corner parallelogram areas) / (prod of corner
/// edge-norm sums))^(1/4), clamped to [0,1]. Non-convex quads score 0;
/// convexity requires the four corner cross products to agree in direction.
inline double quad_lambda(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  const Vec3 ab = b - a, ad = d - a;
  const Vec3 bc = c - b, ba = a - b;
  const Vec3 cd = d - c, cb = b - c;
  const Vec3 da = a - d, dc = c - d;

  const Vec3 cr[4] = {cross(ab, ad), cross(bc, ba), cross(cd, cb), cross(da, dc)};
  const double den[4] = {norm2(ab) + norm2(ad), norm2(bc) + norm2(ba), norm2(cd) + norm2(cb),
                         norm2(da) + norm2(dc)};

  double den_prod = 1.0;
  for (double d2 : den) {
    if (d2 == 0.0) return 0.0;
    den_prod *= d2;
  }

  const Vec3 n = cr[0] + cr[1] + cr[2] + cr[3];
  for (const Vec3& ci : cr)
    if (dot(ci, n) <= 0.0) return 0.0;

  const double num = std::sqrt(norm2(cr[0]) * norm2(cr[1]) * norm2(cr[2]) * norm2(cr[3]));
  const double lambda = 2.0 * std::sqrt(std::sqrt(num / den_prod));
  return std::clamp(lambda, 0.0, 1.0);
}

inline double element_quality(const Mesh& mesh, const Element& el) {
  if (el.kind == ElementKind::Tri)
    return tri_alpha(mesh.node(el.nodes[0]), mesh.node(el.nodes[1]), mesh.node(el.nodes[2]));
  return quad_lambda(mesh.node(el.nodes[0]), mesh.node(el.nodes[1]), mesh.node(el.nodes[2]),
                     mesh.node(el.nodes[3]));
}

/// Per-type aggregates; the optionals are set only when the mesh contains at
/// least one element of that type.
struct QualitySummary {
  std::optional<double> mq_tri, mse_tri, mq_quad, mse_quad;
  int tri_count = 0;
  int quad_count = 0;
};

namespace detail {

struct Aggregate {
  double mq = 0.0;
  double mse = 0.0;
};

/// MQ = mean(q_i); MSE = sqrt(mean((1 - q_i)^2)).
inline Aggregate aggregate(const std::vector<double>& qualities) {
  Aggregate out;
  if (qualities.empty()) return out;
  double sum = 0.0, sq = 0.0;
  for (double q : qualities) {
    sum += q;
    sq += (1.0 - q) * (1.0 - q);
  }
  const double m = static_cast<double>(qualities.size());
  out.mq = sum / m;
  out.mse = std::sqrt(sq / m);
  return out;
}

}  // namespace detail

inline QualitySummary summarize(const Mesh& mesh) {
  std::vector<double> tri_q, quad_q;
  for (const Element& el : mesh.elements)
    (el.kind == ElementKind::Tri ? tri_q : quad_q).push_back(element_quality(mesh, el));
  QualitySummary s;
  s.tri_count = static_cast<int>(tri_q.size());
  s.quad_count = static_cast<int>(quad_q.size());
  if (!tri_q.empty()) {
    const auto agg = detail::aggregate(tri_q);
    s.mq_tri = agg.mq;
    s.mse_tri = agg.mse;
  }
  if (!quad_q.empty()) {
    const auto agg = detail::aggregate(quad_q);
    s.mq_quad = agg.mq;
    s.mse_quad = agg.mse;
  }
  return s;
}

}  // namespace meshsmooth
