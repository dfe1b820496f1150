#pragma once

// Per-element iteration matrices, their assembly into the diagonally scaled
// global Jacobi operator, and the brute-force target-averaging oracle used to
// validate that assembly.
//
// Each element matrix maps current node coordinates to per-node target
// positions: the position a node would move to, the others held fixed, to
// make its element equilateral (triangles) or square (quads). The 3D
// variants are the printed constants produced by cycling coordinates
// X->Y->Z->X; a static_assert regenerates them from the 2D blocks and fails
// the build on any transcription drift.

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "meshsmooth/core.hpp"
#include "meshsmooth/parallel.hpp"

namespace meshsmooth {

inline constexpr double kRoot3Half = 0.8660254037844386467637231707529362;  // sqrt(3)/2

/// Constant square matrix of one element type; size is 6, 8, 9, or 12
/// (row/column index = local node slot * dim + axis). Self-coupling blocks
/// are zero; each row averages to a rigid half-turn pattern over the coupled
/// nodes.
struct ElementMatrix {
  int size = 0;
  std::array<std::array<double, 12>, 12> a{};

  constexpr double at(int r, int c) const { return a[r][c]; }
  constexpr bool operator==(const ElementMatrix&) const = default;
};

namespace detail {

constexpr ElementMatrix make_tri_matrix_2d() {
  constexpr double h = kRoot3Half;
  const double rows[6][6] = {
      {0, 0, 0.5, h, 0.5, -h},   //
      {0, 0, -h, 0.5, h, 0.5},   //
      {0.5, -h, 0, 0, 0.5, h},   //
      {h, 0.5, 0, 0, -h, 0.5},   //
      {0.5, h, 0.5, -h, 0, 0},   //
      {-h, 0.5, h, 0.5, 0, 0},   //
  };
  ElementMatrix m{};
  m.size = 6;
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) m.a[r][c] = rows[r][c];
  return m;
}

constexpr ElementMatrix make_quad_matrix_2d() {
  constexpr double q = 0.5;
  const double rows[8][8] = {
      {0, 0, q, q, 0, 0, q, -q},   //
      {0, 0, -q, q, 0, 0, q, q},   //
      {q, -q, 0, 0, q, q, 0, 0},   //
      {q, q, 0, 0, -q, q, 0, 0},   //
      {0, 0, q, -q, 0, 0, q, q},   //
      {0, 0, q, q, 0, 0, -q, q},   //
      {q, q, 0, 0, q, -q, 0, 0},   //
      {-q, q, 0, 0, q, q, 0, 0},   //
  };
  ElementMatrix m{};
  m.size = 8;
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) m.a[r][c] = rows[r][c];
  return m;
}

constexpr ElementMatrix make_tri_matrix_3d() {
  constexpr double h = kRoot3Half;
  const double rows[9][9] = {
      {0, 0, 0, 0.5, h, -h, 0.5, -h, h},    //
      {0, 0, 0, -h, 0.5, h, h, 0.5, -h},    //
      {0, 0, 0, h, -h, 0.5, -h, h, 0.5},    //
      {0.5, -h, h, 0, 0, 0, 0.5, h, -h},    //
      {h, 0.5, -h, 0, 0, 0, -h, 0.5, h},    //
      {-h, h, 0.5, 0, 0, 0, h, -h, 0.5},    //
      {0.5, h, -h, 0.5, -h, h, 0, 0, 0},    //
      {-h, 0.5, h, h, 0.5, -h, 0, 0, 0},    //
      {h, -h, 0.5, -h, h, 0.5, 0, 0, 0},    //
  };
  ElementMatrix m{};
  m.size = 9;
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 9; ++c) m.a[r][c] = rows[r][c];
  return m;
}

constexpr ElementMatrix make_quad_matrix_3d() {
  constexpr double q = 0.5;
  const double rows[12][12] = {
      {0, 0, 0, q, q, -q, 0, 0, 0, q, -q, q},   //
      {0, 0, 0, -q, q, q, 0, 0, 0, q, q, -q},   //
      {0, 0, 0, q, -q, q, 0, 0, 0, -q, q, q},   //
      {q, -q, q, 0, 0, 0, q, q, -q, 0, 0, 0},   //
      {q, q, -q, 0, 0, 0, -q, q, q, 0, 0, 0},   //
      {-q, q, q, 0, 0, 0, q, -q, q, 0, 0, 0},   //
      {0, 0, 0, q, -q, q, 0, 0, 0, q, q, -q},   //
      {0, 0, 0, q, q, -q, 0, 0, 0, -q, q, q},   //
      {0, 0, 0, -q, q, q, 0, 0, 0, q, -q, q},   //
      {q, q, -q, 0, 0, 0, q, -q, q, 0, 0, 0},   //
      {-q, q, q, 0, 0, 0, q, q, -q, 0, 0, 0},   //
      {q, -q, q, 0, 0, 0, -q, q, q, 0, 0, 0},   //
  };
  ElementMatrix m{};
  m.size = 12;
  for (int r = 0; r < 12; ++r)
    for (int c = 0; c < 12; ++c) m.a[r][c] = rows[r][c];
  return m;
}

// Lifts a 2D matrix to 3D by the coordinate cycle X->Y->Z->X: every 2x2 block
// [[a, b], [-b, a]] becomes a*I3 + b*S with S the cyclic skew pattern below.
// Throws (failing constant evaluation) if a block is not of rotation form.
constexpr ElementMatrix cyclic_extension(const ElementMatrix& m2, int node_count) {
  constexpr double skew[3][3] = {{0, 1, -1}, {-1, 0, 1}, {1, -1, 0}};
  ElementMatrix m3{};
  m3.size = node_count * 3;
  for (int i = 0; i < node_count; ++i)
    for (int j = 0; j < node_count; ++j) {
      const double a = m2.at(2 * i, 2 * j);
      const double b = m2.at(2 * i, 2 * j + 1);
      if (m2.at(2 * i + 1, 2 * j) != -b || m2.at(2 * i + 1, 2 * j + 1) != a)
        throw "planar block is not a rotation pattern";
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
          m3.a[3 * i + r][3 * j + c] = (r == c ? a : 0.0) + b * skew[r][c];
    }
  return m3;
}

inline constexpr ElementMatrix kTriMatrix2 = make_tri_matrix_2d();
inline constexpr ElementMatrix kTriMatrix3 = make_tri_matrix_3d();
inline constexpr ElementMatrix kQuadMatrix2 = make_quad_matrix_2d();
inline constexpr ElementMatrix kQuadMatrix3 = make_quad_matrix_3d();

static_assert(cyclic_extension(kTriMatrix2, 3) == kTriMatrix3,
              "3D triangle matrix disagrees with the cyclic extension of the 2D one");
static_assert(cyclic_extension(kQuadMatrix2, 4) == kQuadMatrix3,
              "3D quad matrix disagrees with the cyclic extension of the 2D one");

}  // namespace detail

inline const ElementMatrix& tri_element_matrix(int dim) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("element matrices exist for dim 2 or 3");
  return dim == 2 ? detail::kTriMatrix2 : detail::kTriMatrix3;
}

inline const ElementMatrix& quad_element_matrix(int dim) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("element matrices exist for dim 2 or 3");
  return dim == 2 ? detail::kQuadMatrix2 : detail::kQuadMatrix3;
}

inline const ElementMatrix& element_matrix(ElementKind kind, int dim) {
  return kind == ElementKind::Tri ? tri_element_matrix(dim) : quad_element_matrix(dim);
}

namespace detail {

// Scalar form of the single-element target of one node, evaluated on an
// arbitrary coordinate vector. Written out long-hand (rather than through the
// constant matrices) so it can serve as an independent check of the assembly.
inline Vec3 element_target_at(int dim, const Element& el, const std::vector<double>& coords,
                              int slot) {
  constexpr double h = kRoot3Half;
  Vec3 t{};
  if (el.kind == ElementKind::Tri) {
    // Slot cycle A -> (B, C): the target keeps the other two nodes fixed.
    const Vec3 b = node_at(dim, coords, el.nodes[(slot + 1) % 3]);
    const Vec3 c = node_at(dim, coords, el.nodes[(slot + 2) % 3]);
    if (dim == 2) {
      t.x = 0.5 * (b.x + c.x) + h * (b.y - c.y);
      t.y = h * (-b.x + c.x) + 0.5 * (b.y + c.y);
    } else {
      t.x = 0.5 * (b.x + c.x) + h * (b.y - c.y) - h * (b.z - c.z);
      t.y = 0.5 * (b.y + c.y) - h * (b.x - c.x) + h * (b.z - c.z);
      t.z = 0.5 * (b.z + c.z) + h * (b.x - c.x) - h * (b.y - c.y);
    }
  } else {
    // A couples only to its edge neighbours B and D; the opposite corner is
    // not read.
    const Vec3 b = node_at(dim, coords, el.nodes[(slot + 1) % 4]);
    const Vec3 d = node_at(dim, coords, el.nodes[(slot + 3) % 4]);
    if (dim == 2) {
      t.x = 0.5 * (b.x + d.x) + 0.5 * (b.y - d.y);
      t.y = 0.5 * (-b.x + d.x) + 0.5 * (b.y + d.y);
    } else {
      t.x = 0.5 * (b.x + d.x) + 0.5 * ((b.y - d.y) - (b.z - d.z));
      t.y = 0.5 * (b.y + d.y) + 0.5 * (-(b.x - d.x) + (b.z - d.z));
      t.z = 0.5 * (b.z + d.z) + 0.5 * ((b.x - d.x) - (b.y - d.y));
    }
  }
  return t;
}

}  // namespace detail

/// Target position of one element node with the element's other nodes held
/// fixed (equilateral target for triangles, square target for quads).
inline Vec3 element_target(const Mesh& mesh, int element_id, int local_node) {
  return detail::element_target_at(mesh.dim, mesh.elements[element_id], mesh.coords, local_node);
}

/// Assembled, diagonally scaled global Jacobi operator. Row (node, axis) holds
/// the already 1/e_i-scaled coefficients; rows of isolated nodes (e_i = 0) are
/// stored empty and act as identity.
struct JacobiMatrix {
  struct Entry {
    int col = 0;
    double value = 0.0;
  };

  int nodes = 0;
  int dim = 2;
  std::vector<double> scale;                // 1/e_i per node (1.0 when e_i = 0)
  std::vector<std::vector<Entry>> rows;     // length nodes*dim, scale folded in
};

inline JacobiMatrix assemble(const Mesh& mesh, const Adjacency& adj) {
  JacobiMatrix jm;
  jm.nodes = mesh.node_count();
  jm.dim = mesh.dim;
  const int dim = mesh.dim;

  std::vector<std::map<int, double>> acc(static_cast<std::size_t>(jm.nodes) * dim);
  for (const Element& el : mesh.elements) {
    const ElementMatrix& m = element_matrix(el.kind, dim);
    const int k = el.size();
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        if (i == j) continue;  // self-coupling blocks are zero
        for (int ai = 0; ai < dim; ++ai)
          for (int aj = 0; aj < dim; ++aj) {
            const double v = m.at(i * dim + ai, j * dim + aj);
            if (v != 0.0) acc[el.nodes[i] * dim + ai][el.nodes[j] * dim + aj] += v;
          }
      }
  }

  jm.scale.resize(jm.nodes, 1.0);
  jm.rows.resize(acc.size());
  for (int node = 0; node < jm.nodes; ++node) {
    const int e = adj.counts[node];
    if (e == 0) continue;
    jm.scale[node] = 1.0 / static_cast<double>(e);
    for (int axis = 0; axis < dim; ++axis) {
      auto& row = jm.rows[node * dim + axis];
      row.reserve(acc[node * dim + axis].size());
      for (const auto& [col, v] : acc[node * dim + axis])
        row.push_back({col, v * jm.scale[node]});
    }
  }
  return jm;
}

/// One Jacobi step: out = D*K*x, reading only step-k coordinates. Empty rows
/// copy their input. Parallel over rows; deterministic for any thread count.
inline void apply_into(const JacobiMatrix& jm, const std::vector<double>& x,
                       std::vector<double>& out, int threads = 1) {
  const std::size_t len = static_cast<std::size_t>(jm.nodes) * jm.dim;
  if (x.size() != len) throw std::invalid_argument("coordinate vector length mismatch");
  out.resize(len);
  parallel_for(static_cast<int>(len), threads, [&](int r) {
    const auto& row = jm.rows[r];
    if (row.empty()) {
      out[r] = x[r];
      return;
    }
    double sum = 0.0;
    for (const auto& e : row) sum += e.value * x[e.col];
    out[r] = sum;
  });
}

inline std::vector<double> apply(const JacobiMatrix& jm, const std::vector<double>& x,
                                 int threads = 1) {
  std::vector<double> out;
  apply_into(jm, x, out, threads);
  return out;
}

/// Brute-force reference for apply(): every node moves to the centroid of its
/// per-element target positions; isolated nodes stay put.
inline std::vector<double> target_oracle(const Mesh& mesh, const Adjacency& adj,
                                         const std::vector<double>& coords) {
  const int dim = mesh.dim;
  if (coords.size() != static_cast<std::size_t>(mesh.node_count()) * dim)
    throw std::invalid_argument("coordinate vector length mismatch");
  std::vector<double> out(coords.size());
  for (int i = 0; i < mesh.node_count(); ++i) {
    Vec3 p;
    if (adj.counts[i] == 0) {
      p = node_at(dim, coords, i);
    } else {
      Vec3 sum{};
      for (const IncidentRef& ref : adj.incident[i])
        sum += detail::element_target_at(dim, mesh.elements[ref.element], coords, ref.slot);
      p = sum / static_cast<double>(adj.counts[i]);
    }
    out[i * dim + 0] = p.x;
    out[i * dim + 1] = p.y;
    if (dim == 3) out[i * dim + 2] = p.z;
  }
  return out;
}

}  // namespace meshsmooth
