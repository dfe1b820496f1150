#pragma once

// Planar smoothing: the assembled Jacobi iteration with per-element ideal
// shape targets, and classic Laplacian smoothing as the baseline. Updates are
// always simultaneous (Jacobi style); boundary nodes are fixed by default and
// the loop stops once no node moves farther than the tolerance.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "meshsmooth/assembly.hpp"
#include "meshsmooth/core.hpp"
#include "meshsmooth/parallel.hpp"
#include "meshsmooth/quality.hpp"
#include "meshsmooth/smooth_result.hpp"

namespace meshsmooth {

struct PlanarConfig {
  double tol = 1e-6;
  bool tol_relative = true;  // interpret tol as a fraction of the bbox diagonal
  int max_iter = 1000;
  enum class Method { Mdm, Laplacian } method = Method::Mdm;
  bool fix_boundary = true;
  int threads = 1;
};

/// One Jacobi-style Laplacian step: every free node moves to the centroid of
/// its distinct edge-connected neighbours, reading only the input positions.
inline std::vector<double> laplacian_step(const Mesh& mesh, const Adjacency& adj,
                                          const std::vector<bool>& fixed, int threads = 1) {
  const int n = mesh.node_count();
  const int dim = mesh.dim;
  std::vector<double> out = mesh.coords;
  parallel_for(n, threads, [&](int i) {
    if (i < static_cast<int>(fixed.size()) && fixed[i]) return;
    std::vector<int> ring;
    for (const IncidentRef& ref : adj.incident[i]) {
      const Element& el = mesh.elements[ref.element];
      const int k = el.size();
      ring.push_back(el.nodes[(ref.slot + 1) % k]);
      ring.push_back(el.nodes[(ref.slot + k - 1) % k]);
    }
    std::sort(ring.begin(), ring.end());
    ring.erase(std::unique(ring.begin(), ring.end()), ring.end());
    if (ring.empty()) return;
    Vec3 sum{};
    for (int j : ring) sum += mesh.node(j);
    const Vec3 c = sum / static_cast<double>(ring.size());
    out[i * dim + 0] = c.x;
    out[i * dim + 1] = c.y;
    if (dim == 3) out[i * dim + 2] = c.z;
  });
  return out;
}

namespace detail {

inline double max_node_displacement(int dim, const std::vector<double>& a,
                                    const std::vector<double>& b) {
  double worst = 0.0;
  const int n = static_cast<int>(a.size()) / dim;
  for (int i = 0; i < n; ++i) {
    double d2 = 0.0;
    for (int k = 0; k < dim; ++k) {
      const double d = b[i * dim + k] - a[i * dim + k];
      d2 += d * d;
    }
    worst = std::max(worst, d2);
  }
  return std::sqrt(worst);
}

}  // namespace detail

/// Smooths a 2D mesh until the largest node displacement of an iteration
/// drops to the tolerance or `max_iter` is reached. Connectivity never
/// changes and fixed nodes keep their input coordinates bit for bit. The
/// planar loop never rolls moves back; any elements left inverted are listed
/// in the result for the caller to report.
inline SmoothResult smooth_planar(const Mesh& mesh, const PlanarConfig& cfg) {
  if (mesh.dim != 2) throw std::invalid_argument("planar smoothing requires a 2D mesh");
  if (const std::string err = structural_error(mesh); !err.empty())
    throw std::invalid_argument("invalid mesh: " + err);
  if (const auto bad = validate_orientation(mesh); !bad.empty())
    throw std::invalid_argument("mesh has " + std::to_string(bad.size()) +
                                " clockwise element(s), e.g. element " + std::to_string(bad[0]));
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (cfg.max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");

  const Adjacency adj = build_adjacency(mesh);
  std::vector<bool> fixed(mesh.node_count(), false);
  if (cfg.fix_boundary)
    for (int i : boundary_nodes(mesh)) fixed[i] = true;

  const double tol_abs = cfg.tol_relative ? cfg.tol * bounding_box(mesh).diagonal() : cfg.tol;
  const bool use_mdm = cfg.method == PlanarConfig::Method::Mdm;
  const JacobiMatrix jm = use_mdm ? assemble(mesh, adj) : JacobiMatrix{};

  SmoothResult result;
  Mesh work = mesh;
  std::vector<double> cur = mesh.coords;
  std::vector<double> next;
  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    if (use_mdm)
      apply_into(jm, cur, next, cfg.threads);
    else
      next = laplacian_step(work, adj, fixed, cfg.threads);
    for (int i = 0; i < mesh.node_count(); ++i)
      if (fixed[i])
        for (int k = 0; k < 2; ++k) next[i * 2 + k] = cur[i * 2 + k];
    const double maxd = detail::max_node_displacement(2, cur, next);
    cur.swap(next);
    work.coords = cur;
    result.history.push_back({summarize(work), maxd, 0});
    if (maxd <= tol_abs) {
      result.converged = true;
      break;
    }
  }
  result.iterations = static_cast<int>(result.history.size());
  result.mesh = std::move(work);
  result.inverted_elements = validate_orientation(result.mesh);
  return result;
}

}  // namespace meshsmooth
