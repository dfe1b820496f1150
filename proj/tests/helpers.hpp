#pragma once

// Shared test fixtures: hand-built meshes with known structure, rigid
// motions, a seeded small-mesh generator, and an independent point-to-triangle
// distance used to check that smoothed nodes stay on the original surface.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <tuple>
#include <vector>

#include "meshsmooth/core.hpp"
#include "meshsmooth/meshgen.hpp"

namespace testutil {

using meshsmooth::Element;
using meshsmooth::Mesh;
using meshsmooth::Vec3;

inline Mesh make_mesh2(std::vector<double> xy, std::vector<Element> elements) {
  Mesh m;
  m.dim = 2;
  m.coords = std::move(xy);
  m.elements = std::move(elements);
  return m;
}

inline Mesh make_mesh3(std::vector<double> xyz, std::vector<Element> elements) {
  Mesh m;
  m.dim = 3;
  m.coords = std::move(xyz);
  m.elements = std::move(elements);
  return m;
}

/// 2D mesh embedded in the z = 0 plane.
inline Mesh embed3(const Mesh& mesh) {
  Mesh out;
  out.dim = 3;
  out.elements = mesh.elements;
  out.coords.resize(3 * static_cast<std::size_t>(mesh.node_count()));
  for (int i = 0; i < mesh.node_count(); ++i) {
    out.coords[3 * i + 0] = mesh.coords[2 * i + 0];
    out.coords[3 * i + 1] = mesh.coords[2 * i + 1];
    out.coords[3 * i + 2] = 0.0;
  }
  return out;
}

/// Unit-side equilateral triangle tiling, nx columns x ny rows of nodes.
/// Every interior node sits at the centroid of its six ring neighbours.
inline Mesh equilateral_tiling(int nx, int ny) {
  const double h = std::sqrt(3.0) / 2.0;
  Mesh m;
  m.dim = 2;
  auto id = [nx](int i, int j) { return j * nx + i; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      m.coords.push_back(i + 0.5 * j);
      m.coords.push_back(j * h);
    }
  for (int j = 0; j + 1 < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      m.elements.push_back(Element::tri(id(i, j), id(i + 1, j), id(i, j + 1)));
      m.elements.push_back(Element::tri(id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)));
    }
  return m;
}

/// Closed axis-aligned unit cube shell with `k` x `k` quads per side, welded
/// vertices, and consistent outward winding.
inline Mesh cube_shell(int k) {
  Mesh m;
  m.dim = 3;
  std::map<std::tuple<double, double, double>, int> ids;
  auto node_id = [&](const Vec3& p) {
    const auto key = std::make_tuple(p.x, p.y, p.z);
    if (const auto it = ids.find(key); it != ids.end()) return it->second;
    const int id = static_cast<int>(ids.size());
    ids.emplace(key, id);
    m.coords.insert(m.coords.end(), {p.x, p.y, p.z});
    return id;
  };
  struct Face {
    Vec3 origin, u, v;
  };
  // u x v points outward for every side.
  const Face faces[6] = {
      {{0, 0, 0}, {0, 1, 0}, {1, 0, 0}},  // z = 0
      {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}},  // z = 1
      {{0, 0, 0}, {0, 0, 1}, {0, 1, 0}},  // x = 0
      {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}},  // x = 1
      {{0, 0, 0}, {1, 0, 0}, {0, 0, 1}},  // y = 0
      {{0, 1, 0}, {0, 0, 1}, {1, 0, 0}},  // y = 1
  };
  for (const Face& f : faces)
    for (int j = 0; j < k; ++j)
      for (int i = 0; i < k; ++i) {
        auto corner = [&](int a, int b) {
          return f.origin + f.u * (static_cast<double>(a) / k) +
                 f.v * (static_cast<double>(b) / k);
        };
        m.elements.push_back(Element::quad(node_id(corner(i, j)), node_id(corner(i + 1, j)),
                                           node_id(corner(i + 1, j + 1)),
                                           node_id(corner(i, j + 1))));
      }
  return m;
}

struct RigidMotion {
  double r[3][3];
  Vec3 t;

  Vec3 operator()(const Vec3& p) const {
    return {r[0][0] * p.x + r[0][1] * p.y + r[0][2] * p.z + t.x,
            r[1][0] * p.x + r[1][1] * p.y + r[1][2] * p.z + t.y,
            r[2][0] * p.x + r[2][1] * p.y + r[2][2] * p.z + t.z};
  }
};

inline RigidMotion rotation2d(double angle, const Vec3& t) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {{{c, -s, 0}, {s, c, 0}, {0, 0, 1}}, t};
}

/// Rodrigues rotation about a unit axis.
inline RigidMotion rotation3d(const Vec3& axis_in, double angle, const Vec3& t) {
  const Vec3 a = meshsmooth::normalized(axis_in);
  const double c = std::cos(angle), s = std::sin(angle), ic = 1.0 - c;
  RigidMotion rm{{{c + a.x * a.x * ic, a.x * a.y * ic - a.z * s, a.x * a.z * ic + a.y * s},
                  {a.y * a.x * ic + a.z * s, c + a.y * a.y * ic, a.y * a.z * ic - a.x * s},
                  {a.z * a.x * ic - a.y * s, a.z * a.y * ic + a.x * s, c + a.z * a.z * ic}},
                 t};
  return rm;
}

inline Mesh transformed(const Mesh& mesh, const RigidMotion& rm) {
  Mesh out = mesh;
  for (int i = 0; i < mesh.node_count(); ++i) out.set_node(i, rm(mesh.node(i)));
  return out;
}

/// Small seeded mesh cycling through element kinds, sizes, jitter, and lifts;
/// index `which` picks the variant. Always at most ~35 nodes.
inline Mesh small_random_mesh(std::uint64_t seed, int which) {
  meshsmooth::GenSpec spec;
  const meshsmooth::GridKind kinds[4] = {
      meshsmooth::GridKind::TriGrid, meshsmooth::GridKind::QuadGrid,
      meshsmooth::GridKind::TriDominant, meshsmooth::GridKind::QuadDominant};
  const meshsmooth::LiftKind lifts[3] = {meshsmooth::LiftKind::None,
                                         meshsmooth::LiftKind::SinxCosy,
                                         meshsmooth::LiftKind::Paraboloid};
  spec.kind = kinds[which % 4];
  spec.lift = lifts[(which / 4) % 3];
  spec.nx = 2 + which % 4;
  spec.ny = 2 + (which / 2) % 4;
  spec.perturb = 0.1 * (which % 3);
  spec.seed = seed;
  return meshsmooth::generate(spec);
}

/// Distance from p to triangle abc (closest-point decomposition).
inline double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  using meshsmooth::dot;
  using meshsmooth::norm;
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0.0 && d2 <= 0.0) return norm(ap);
  const Vec3 bp = p - b;
  const double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0.0 && d4 <= d3) return norm(bp);
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return norm(ap - ab * (d1 / (d1 - d3)));
  const Vec3 cp = p - c;
  const double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0.0 && d5 <= d6) return norm(cp);
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return norm(ap - ac * (d2 / (d2 - d6)));
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return norm(p - (b + (c - b) * w));
  }
  const double denom = 1.0 / (va + vb + vc);
  return norm(p - (a + ab * (vb * denom) + ac * (vc * denom)));
}

/// Distance from p to the nearest of the listed faces of `mesh` (quads are
/// split along the 0-2 diagonal).
inline double distance_to_faces(const Mesh& mesh, const std::vector<int>& faces, const Vec3& p) {
  double best = std::numeric_limits<double>::infinity();
  for (int e : faces) {
    const Element& el = mesh.elements[e];
    Vec3 pts[4];
    for (int s = 0; s < el.size(); ++s) pts[s] = mesh.node(el.nodes[s]);
    best = std::min(best, point_triangle_distance(p, pts[0], pts[1], pts[2]));
    if (el.kind == meshsmooth::ElementKind::Quad)
      best = std::min(best, point_triangle_distance(p, pts[0], pts[2], pts[3]));
  }
  return best;
}

}  // namespace testutil
