#pragma once

// Surface smoothing pipeline: estimate vertex normals by least squares over
// incident-face normals, label corner/ridge nodes from the eigenvalues of the
// normal scatter matrix and fix them together with boundary nodes, relocate
// the free nodes with the assembled Jacobi operator, project every relocation
// back onto the original mesh along the updated vertex normal, and roll back
// any move that would invert an incident face. Iteration stops once neither
// MQ nor MSE improves by more than the configured thresholds.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "meshsmooth/assembly.hpp"
#include "meshsmooth/core.hpp"
#include "meshsmooth/parallel.hpp"
#include "meshsmooth/planar.hpp"
#include "meshsmooth/quality.hpp"
#include "meshsmooth/smooth_result.hpp"

namespace meshsmooth {

struct SurfaceConfig {
  double eps_mq = 1e-6;    // stop threshold on |delta MQ|
  double eps_mse = 1e-4;   // stop threshold on |delta MSE|
  double chi_corner = 0.7; // corner test: lambda3/lambda1 >= chi_corner
  double chi_ridge = 0.1;  // ridge test:  lambda2/lambda1 >= chi_ridge
  int max_iter = 200;
  enum class WeightMode { Identity, FaceArea } weight_mode = WeightMode::Identity;
  int threads = 1;
};

/// Unit face normals (zero and flagged invalid for degenerate faces) plus
/// face areas, used both for vertex normals and as optional feature weights.
struct FaceNormals {
  std::vector<Vec3> normal;
  std::vector<double> area;
  std::vector<char> valid;
};

inline FaceNormals face_normals(const Mesh& mesh) {
  FaceNormals fn;
  const std::size_t m = mesh.elements.size();
  fn.normal.resize(m);
  fn.area.resize(m, 0.0);
  fn.valid.resize(m, 0);
  for (std::size_t e = 0; e < m; ++e) {
    const Element& el = mesh.elements[e];
    Vec3 pts[4];
    double edge2 = 0.0;
    const int k = el.size();
    for (int i = 0; i < k; ++i) pts[i] = mesh.node(el.nodes[i]);
    for (int i = 0; i < k; ++i) edge2 = std::max(edge2, norm2(pts[(i + 1) % k] - pts[i]));
    const Vec3 n = newell_normal(pts, k);
    const double len = norm(n);
    if (len > 1e-12 * edge2) {
      fn.normal[e] = n / len;
      fn.area[e] = 0.5 * len;
      fn.valid[e] = 1;
    }
  }
  return fn;
}

/// Per-node unit normals. Nodes whose incident faces are all degenerate (or
/// missing) come back invalid and must be treated as constrained.
struct VertexNormals {
  std::vector<Vec3> normal;
  std::vector<char> valid;
};

/// Solves, for each node, the least-squares system N x = 1 over its incident
/// unit face normals (pseudo-inverse via SVD, so rank-deficient neighbourhoods
/// get the minimum-norm solution) and normalizes the result. Falls back to
/// the area-weighted mean face normal if the solution degenerates to zero.
inline VertexNormals estimate_normals(const Mesh& mesh, const Adjacency& adj,
                                      const FaceNormals& fn, int threads = 1) {
  const int n = mesh.node_count();
  VertexNormals vn;
  vn.normal.resize(n);
  vn.valid.resize(n, 0);
  parallel_for(n, threads, [&](int i) {
    int m = 0;
    for (const IncidentRef& ref : adj.incident[i])
      if (fn.valid[ref.element]) ++m;
    if (m == 0) return;
    Eigen::MatrixXd rows(m, 3);
    int r = 0;
    for (const IncidentRef& ref : adj.incident[i]) {
      if (!fn.valid[ref.element]) continue;
      const Vec3& f = fn.normal[ref.element];
      rows(r, 0) = f.x;
      rows(r, 1) = f.y;
      rows(r, 2) = f.z;
      ++r;
    }
    const Eigen::VectorXd x = rows.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV)
                                  .solve(Eigen::VectorXd::Ones(m));
    Vec3 nrm{x(0), x(1), x(2)};
    if (norm(nrm) <= 1e-12) {
      Vec3 avg{};
      for (const IncidentRef& ref : adj.incident[i])
        if (fn.valid[ref.element]) avg += fn.normal[ref.element] * fn.area[ref.element];
      nrm = avg;
    }
    if (norm(nrm) <= 1e-12) return;
    vn.normal[i] = normalized(nrm);
    vn.valid[i] = 1;
  });
  return vn;
}

inline VertexNormals estimate_normals(const Mesh& mesh) {
  return estimate_normals(mesh, build_adjacency(mesh), face_normals(mesh));
}

/// Normal scatter matrix A = N^T W N of one node with its eigenvalues sorted
/// descending (clamped at zero; A is positive semi-definite).
struct FeatureMatrix {
  std::array<double, 9> a{};
  std::array<double, 3> eigenvalues{};
};

inline FeatureMatrix node_feature_matrix(const Adjacency& adj, const FaceNormals& fn, int node,
                                         SurfaceConfig::WeightMode weight_mode) {
  Eigen::Matrix3d a = Eigen::Matrix3d::Zero();
  for (const IncidentRef& ref : adj.incident[node]) {
    if (!fn.valid[ref.element]) continue;
    const Vec3& f = fn.normal[ref.element];
    const double w = weight_mode == SurfaceConfig::WeightMode::FaceArea ? fn.area[ref.element] : 1.0;
    Eigen::Vector3d v(f.x, f.y, f.z);
    a += w * v * v.transpose();
  }
  FeatureMatrix out;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) out.a[r * 3 + c] = a(r, c);
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(a);
  for (int k = 0; k < 3; ++k) out.eigenvalues[k] = std::max(0.0, eig.eigenvalues()(2 - k));
  return out;
}

/// Labels every node: Corner when lambda3/lambda1 >= chi_corner, else Ridge
/// when lambda2/lambda1 >= chi_ridge, else Smooth; boundary membership
/// overrides everything. Nodes without a usable scatter matrix are labelled
/// Corner so they stay constrained.
inline NodeClassification classify(const Mesh& mesh, const FaceNormals& fn,
                                   const SurfaceConfig& cfg) {
  if (mesh.dim != 3) throw std::invalid_argument("feature classification requires a 3D mesh");
  if (!(cfg.chi_corner > 0.0 && cfg.chi_corner <= 1.0) ||
      !(cfg.chi_ridge > 0.0 && cfg.chi_ridge <= 1.0) || cfg.chi_corner < cfg.chi_ridge)
    throw std::invalid_argument("feature thresholds must lie in (0, 1] with chi_corner >= chi_ridge");
  const Adjacency adj = build_adjacency(mesh);
  NodeClassification cls;
  cls.labels.resize(mesh.node_count(), NodeLabel::Smooth);
  for (int i = 0; i < mesh.node_count(); ++i) {
    const FeatureMatrix fm = node_feature_matrix(adj, fn, i, cfg.weight_mode);
    const double l1 = fm.eigenvalues[0];
    if (l1 <= 0.0) {
      cls.labels[i] = NodeLabel::Corner;
      continue;
    }
    if (fm.eigenvalues[2] / l1 >= cfg.chi_corner)
      cls.labels[i] = NodeLabel::Corner;
    else if (fm.eigenvalues[1] / l1 >= cfg.chi_ridge)
      cls.labels[i] = NodeLabel::Ridge;
  }
  for (int i : boundary_nodes(mesh)) cls.labels[i] = NodeLabel::Boundary;
  return cls;
}

/// Outcome of projecting a relocated node onto its original neighbourhood.
/// `hits` is the number of mapped points found over all neighbourhood faces;
/// `point` is set to the hit nearest the relocated position when hits > 0.
struct Projection {
  bool hit = false;
  Vec3 point{};
  int hits = 0;
};

namespace detail {

inline constexpr double kBarycentricSlack = 1e-9;

// Line/triangle intersection returning the signed parameter along `dir`.
inline std::optional<double> line_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a,
                                           const Vec3& b, const Vec3& c) {
  const Vec3 e1 = b - a, e2 = c - a;
  const Vec3 pv = cross(dir, e2);
  const double det = dot(e1, pv);
  if (std::abs(det) <= 1e-14 * std::sqrt(norm2(e1) * norm2(e2))) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 tv = origin - a;
  const double u = dot(tv, pv) * inv;
  if (u < -kBarycentricSlack || u > 1.0 + kBarycentricSlack) return std::nullopt;
  const Vec3 qv = cross(tv, e1);
  const double v = dot(dir, qv) * inv;
  if (v < -kBarycentricSlack || u + v > 1.0 + kBarycentricSlack) return std::nullopt;
  return dot(e2, qv) * inv;
}

}  // namespace detail

/// Intersects the line through `p` along +-`unit_normal` with the listed
/// faces of `original` (quads are split along their 0-2 diagonal for the
/// test only). Zero hits is a defined outcome, not an error.
inline Projection project_along_normal(const Mesh& original, const std::vector<int>& faces,
                                       const Vec3& p, const Vec3& unit_normal) {
  Projection out;
  double best = 0.0;
  for (int e : faces) {
    const Element& el = original.elements[e];
    Vec3 pts[4];
    for (int i = 0; i < el.size(); ++i) pts[i] = original.node(el.nodes[i]);
    const int tris = el.kind == ElementKind::Tri ? 1 : 2;
    for (int t = 0; t < tris; ++t) {
      const Vec3& a = pts[0];
      const Vec3& b = pts[t + 1];
      const Vec3& c = pts[t + 2];
      if (const auto t_hit = detail::line_triangle(p, unit_normal, a, b, c)) {
        ++out.hits;
        if (!out.hit || std::abs(*t_hit) < std::abs(best)) {
          out.hit = true;
          best = *t_hit;
        }
      }
    }
  }
  if (out.hit) out.point = p + unit_normal * best;
  return out;
}

/// True when the face flips (or collapses) across a candidate move: the
/// Newell normals before and after have non-positive dot product.
inline bool is_inverted(const Vec3* before, const Vec3* after, int count) {
  return dot(newell_normal(before, count), newell_normal(after, count)) <= 0.0;
}

/// Stopping rule over the quality history (oldest first, including the
/// pre-smoothing summary): stop once, for every element type present, both
/// |delta MQ| < eps_mq and |delta MSE| < eps_mse between the last two
/// entries. Never true while the last iteration had to recover an inversion.
inline bool should_stop(const std::vector<QualitySummary>& history, const SurfaceConfig& cfg,
                        int inversions_in_last_iteration = 0) {
  if (history.size() < 2 || inversions_in_last_iteration > 0) return false;
  const QualitySummary& prev = history[history.size() - 2];
  const QualitySummary& last = history.back();
  auto settled = [](const std::optional<double>& a, const std::optional<double>& b, double eps) {
    return a && b && std::abs(*b - *a) < eps;
  };
  if (last.tri_count > 0 && !(settled(prev.mq_tri, last.mq_tri, cfg.eps_mq) &&
                              settled(prev.mse_tri, last.mse_tri, cfg.eps_mse)))
    return false;
  if (last.quad_count > 0 && !(settled(prev.mq_quad, last.mq_quad, cfg.eps_mq) &&
                               settled(prev.mse_quad, last.mse_quad, cfg.eps_mse)))
    return false;
  return true;
}

namespace detail {

inline void validate(const SurfaceConfig& cfg) {
  if (!(cfg.eps_mq > 0.0) || !(cfg.eps_mse > 0.0))
    throw std::invalid_argument("stopping thresholds must be positive");
  if (!(cfg.chi_corner > 0.0 && cfg.chi_corner <= 1.0) ||
      !(cfg.chi_ridge > 0.0 && cfg.chi_ridge <= 1.0))
    throw std::invalid_argument("feature thresholds must lie in (0, 1]");
  if (cfg.chi_corner < cfg.chi_ridge)
    throw std::invalid_argument("chi_corner must be at least chi_ridge");
  if (cfg.max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
}

}  // namespace detail

/// Runs the full surface pipeline on a 3D mesh with consistent winding.
/// Feature detection happens once, on the input; normals are re-estimated
/// from the current iterate every iteration while projection always targets
/// the original faces. All node updates within an iteration are simultaneous.
inline SmoothResult smooth_surface(const Mesh& mesh, const SurfaceConfig& cfg) {
  if (mesh.dim != 3) throw std::invalid_argument("surface smoothing requires a 3D mesh");
  if (const std::string err = structural_error(mesh); !err.empty())
    throw std::invalid_argument("invalid mesh: " + err);
  if (const auto bad = validate_orientation(mesh); !bad.empty())
    throw std::invalid_argument("mesh winding is inconsistent at " + std::to_string(bad.size()) +
                                " element(s), e.g. element " + std::to_string(bad[0]));
  detail::validate(cfg);

  const int n = mesh.node_count();
  const Adjacency adj = build_adjacency(mesh);
  const FaceNormals fn0 = face_normals(mesh);
  const NodeClassification cls = classify(mesh, fn0, cfg);
  const VertexNormals vn0 = estimate_normals(mesh, adj, fn0, cfg.threads);

  std::vector<char> constrained(n, 0);
  for (int i = 0; i < n; ++i)
    if (cls.constrained(i) || !vn0.valid[i]) constrained[i] = 1;

  std::vector<std::vector<int>> neighbourhood(n);
  for (int i = 0; i < n; ++i)
    for (const IncidentRef& ref : adj.incident[i]) neighbourhood[i].push_back(ref.element);

  const JacobiMatrix jm = assemble(mesh, adj);

  SmoothResult result;
  Mesh work = mesh;
  std::vector<double> cur = mesh.coords;
  std::vector<double> relocated;
  std::vector<QualitySummary> quality_history{summarize(mesh)};

  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    const FaceNormals fnk = face_normals(work);
    const VertexNormals vnk = estimate_normals(work, adj, fnk, cfg.threads);
    apply_into(jm, cur, relocated, cfg.threads);

    std::vector<double> next = cur;
    std::vector<char> inverted(n, 0);
    parallel_for(n, cfg.threads, [&](int i) {
      if (constrained[i] || !vnk.valid[i]) return;
      const Vec3 target = node_at(3, relocated, i);
      const Projection proj = project_along_normal(mesh, neighbourhood[i], target, vnk.normal[i]);
      if (!proj.hit) return;  // no mapped point: recover the last coordinates
      Vec3 before[4], after[4];
      for (const IncidentRef& ref : adj.incident[i]) {
        const Element& el = work.elements[ref.element];
        for (int s = 0; s < el.size(); ++s) before[s] = node_at(3, cur, el.nodes[s]);
        for (int s = 0; s < el.size(); ++s) after[s] = s == ref.slot ? proj.point : before[s];
        if (is_inverted(before, after, el.size())) {
          inverted[i] = 1;
          return;
        }
      }
      next[i * 3 + 0] = proj.point.x;
      next[i * 3 + 1] = proj.point.y;
      next[i * 3 + 2] = proj.point.z;
    });

    int inversions = 0;
    for (char f : inverted) inversions += f;
    const double maxd = detail::max_node_displacement(3, cur, next);
    cur.swap(next);
    work.coords = cur;
    quality_history.push_back(summarize(work));
    result.history.push_back({quality_history.back(), maxd, inversions});
    if (should_stop(quality_history, cfg, inversions)) {
      result.converged = true;
      break;
    }
  }
  result.iterations = static_cast<int>(result.history.size());
  result.mesh = std::move(work);
  return result;
}

}  // namespace meshsmooth
