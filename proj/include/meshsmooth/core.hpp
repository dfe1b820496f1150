#pragma once

// Mesh representation shared by every other header: node coordinates (2D or
// 3D), a heterogeneous triangle/quad element list, node->element adjacency,
// orientation validation and boundary detection.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace meshsmooth {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  bool operator==(const Vec3&) const = default;
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }

/// Returns the zero vector when the input has zero length.
inline Vec3 normalized(const Vec3& a) {
  const double n = norm(a);
  return n > 0.0 ? a / n : Vec3{};
}

enum class ElementKind : std::uint8_t { Tri, Quad };

struct Element {
  ElementKind kind = ElementKind::Tri;
  std::array<int, 4> nodes{-1, -1, -1, -1};  // nodes[3] unused for Tri

  static Element tri(int a, int b, int c) { return {ElementKind::Tri, {a, b, c, -1}}; }
  static Element quad(int a, int b, int c, int d) { return {ElementKind::Quad, {a, b, c, d}}; }

  int size() const { return kind == ElementKind::Tri ? 3 : 4; }
  bool operator==(const Element&) const = default;
};

/// Planar or surface mesh of triangles and/or quadrilaterals. Coordinates are
/// stored flat with stride `dim`; element node ids are dense and 0-based.
struct Mesh {
  int dim = 2;  // 2 or 3
  std::vector<double> coords;
  std::vector<Element> elements;

  int node_count() const { return dim > 0 ? static_cast<int>(coords.size()) / dim : 0; }

  Vec3 node(int i) const {
    const double* p = coords.data() + static_cast<std::size_t>(i) * dim;
    return dim == 2 ? Vec3{p[0], p[1], 0.0} : Vec3{p[0], p[1], p[2]};
  }

  void set_node(int i, const Vec3& p) {
    double* q = coords.data() + static_cast<std::size_t>(i) * dim;
    q[0] = p.x;
    q[1] = p.y;
    if (dim == 3) q[2] = p.z;
  }

  bool operator==(const Mesh&) const = default;
};

/// Reads node `i` out of a flat coordinate vector laid out like Mesh::coords.
inline Vec3 node_at(std::uint32_t dim, const std::vector<double>& coords, int i) {
  const double* p = coords.data() + static_cast<std::size_t>(i) * dim;
  return dim == 2 ? Vec3{p[0], p[1], 0.0} : Vec3{p[0], p[1], p[2]};
}

/// Empty string when the mesh is structurally sound, otherwise a description
/// of the first violation found. Orientation is checked separately.
inline std::string structural_error(const Mesh& mesh) {
  if (mesh.dim != 2 && mesh.dim != 3) return "mesh dimension must be 2 or 3";
  if (mesh.coords.size() % mesh.dim != 0)
    return "coordinate array length is not a multiple of the dimension";
  const int n = mesh.node_count();
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const Element& el = mesh.elements[e];
    const int k = el.size();
    for (int i = 0; i < k; ++i) {
      const int id = el.nodes[i];
      if (id < 0 || id >= n)
        return "element " + std::to_string(e) + " references missing node " + std::to_string(id);
      for (int j = i + 1; j < k; ++j)
        if (el.nodes[j] == id)
          return "element " + std::to_string(e) + " repeats node " + std::to_string(id);
    }
  }
  return {};
}

struct IncidentRef {
  int element = 0;
  int slot = 0;
  bool operator==(const IncidentRef&) const = default;
};

/// Per-node incident-element lists (element id ascending) and counts e_i.
struct Adjacency {
  std::vector<std::vector<IncidentRef>> incident;
  std::vector<int> counts;
};

inline Adjacency build_adjacency(const Mesh& mesh) {
  Adjacency adj;
  adj.incident.resize(mesh.node_count());
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const Element& el = mesh.elements[e];
    for (int s = 0; s < el.size(); ++s)
      adj.incident[el.nodes[s]].push_back({static_cast<int>(e), s});
  }
  adj.counts.resize(adj.incident.size());
  for (std::size_t i = 0; i < adj.incident.size(); ++i)
    adj.counts[i] = static_cast<int>(adj.incident[i].size());
  return adj;
}

/// Twice the signed area of a 2D element (shoelace over its node cycle).
inline double signed_area2(const Mesh& mesh, const Element& el) {
  double a = 0.0;
  const int k = el.size();
  for (int i = 0; i < k; ++i) {
    const Vec3 p = mesh.node(el.nodes[i]);
    const Vec3 q = mesh.node(el.nodes[(i + 1) % k]);
    a += p.x * q.y - q.x * p.y;
  }
  return a;
}

/// Newell normal of a polygon (twice the area-weighted normal). For triangles
/// this equals cross(b - a, c - a).
inline Vec3 newell_normal(const Vec3* pts, int count) {
  Vec3 n{};
  for (int i = 0; i < count; ++i) {
    const Vec3& p = pts[i];
    const Vec3& q = pts[(i + 1) % count];
    n.x += (p.y - q.y) * (p.z + q.z);
    n.y += (p.z - q.z) * (p.x + q.x);
    n.z += (p.x - q.x) * (p.y + q.y);
  }
  return n;
}

/// Ids of elements violating the mesh's orientation contract. In 2D these are
/// the elements with negative signed area (zero-area degenerates pass). In 3D
/// an element is flagged when one of its directed edges is traversed in the
/// same direction by another element.
inline std::vector<int> validate_orientation(const Mesh& mesh) {
  std::vector<int> bad;
  if (mesh.dim == 2) {
    for (std::size_t e = 0; e < mesh.elements.size(); ++e)
      if (signed_area2(mesh, mesh.elements[e]) < 0.0) bad.push_back(static_cast<int>(e));
    return bad;
  }
  std::map<std::pair<int, int>, std::vector<int>> directed;
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const Element& el = mesh.elements[e];
    const int k = el.size();
    for (int i = 0; i < k; ++i)
      directed[{el.nodes[i], el.nodes[(i + 1) % k]}].push_back(static_cast<int>(e));
  }
  std::vector<char> flagged(mesh.elements.size(), 0);
  for (const auto& [edge, users] : directed)
    if (users.size() > 1)
      for (int e : users) flagged[e] = 1;
  for (std::size_t e = 0; e < flagged.size(); ++e)
    if (flagged[e]) bad.push_back(static_cast<int>(e));
  return bad;
}

/// Nodes incident to an edge used by exactly one element, ascending order.
inline std::vector<int> boundary_nodes(const Mesh& mesh) {
  std::map<std::pair<int, int>, int> edge_count;
  for (const Element& el : mesh.elements) {
    const int k = el.size();
    for (int i = 0; i < k; ++i) {
      int a = el.nodes[i], b = el.nodes[(i + 1) % k];
      if (a > b) std::swap(a, b);
      ++edge_count[{a, b}];
    }
  }
  std::vector<char> on_boundary(mesh.node_count(), 0);
  for (const auto& [edge, count] : edge_count)
    if (count == 1) {
      on_boundary[edge.first] = 1;
      on_boundary[edge.second] = 1;
    }
  std::vector<int> out;
  for (int i = 0; i < mesh.node_count(); ++i)
    if (on_boundary[i]) out.push_back(i);
  return out;
}

enum class NodeLabel : std::uint8_t { Smooth, Ridge, Corner, Boundary };

inline const char* to_string(NodeLabel label) {
  switch (label) {
    case NodeLabel::Smooth: return "smooth";
    case NodeLabel::Ridge: return "ridge";
    case NodeLabel::Corner: return "corner";
    case NodeLabel::Boundary: return "boundary";
  }
  return "?";
}

/// Per-node feature label. Everything except Smooth is held fixed during
/// surface smoothing; Boundary overrides the eigenvalue-based labels.
struct NodeClassification {
  std::vector<NodeLabel> labels;

  bool constrained(int i) const { return labels[i] != NodeLabel::Smooth; }
};

struct Bounds {
  Vec3 lo{}, hi{};
  double diagonal() const { return norm(hi - lo); }
};

inline Bounds bounding_box(const Mesh& mesh) {
  Bounds b;
  const int n = mesh.node_count();
  if (n == 0) return b;
  b.lo = b.hi = mesh.node(0);
  for (int i = 1; i < n; ++i) {
    const Vec3 p = mesh.node(i);
    b.lo.x = std::min(b.lo.x, p.x);
    b.lo.y = std::min(b.lo.y, p.y);
    b.lo.z = std::min(b.lo.z, p.z);
    b.hi.x = std::max(b.hi.x, p.x);
    b.hi.y = std::max(b.hi.y, p.y);
    b.hi.z = std::max(b.hi.z, p.z);
  }
  return b;
}

}  // namespace meshsmooth
