#pragma once

// Deterministic synthetic test meshes: structured tri/quad grids with seeded
// interior perturbation, optional tri/quad mixing, and optional lifting onto
// an analytic surface. The generator is part of the reproducibility contract:
// a fixed spec always yields a bit-identical mesh (the RNG is splitmix64).

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "meshsmooth/core.hpp"

namespace meshsmooth {

/// splitmix64; state advances by the golden-gamma each draw.
struct SplitMix64 {
  std::uint64_t state = 0;

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in [-1, 1).
  double next_signed() { return 2.0 * next_double() - 1.0; }
};

enum class GridKind { TriGrid, QuadGrid, TriDominant, QuadDominant };
enum class LiftKind { None, SinxCosy, Paraboloid };

/// Fraction of cells converted by the mixed-mesh kinds.
inline constexpr double kTriDominantSplitFraction = 0.2;
inline constexpr double kQuadDominantQuadFraction = 0.8;
/// Position along a cell diagonal of the extra node a TriDominant split adds.
inline constexpr double kDiagonalSplitRatio = 0.35;

struct GenSpec {
  GridKind kind = GridKind::TriGrid;
  int nx = 2;               // nodes per row
  int ny = 2;               // nodes per column
  double perturb = 0.0;     // interior jitter, fraction of cell size, [0, 0.5)
  std::uint64_t seed = 0;
  LiftKind lift = LiftKind::None;
};

namespace detail {

struct CellPlan {
  int corner[4];  // p00, p10, p11, p01 (counterclockwise)
  enum Shape { TwoTris, OneQuad, TriQuadSplit } shape = TwoTris;
  int mid_node = -1;  // extra diagonal node for TriQuadSplit
};

}  // namespace detail

/// Builds the mesh described by `spec`. Deterministic per seed; the output
/// always satisfies the structural invariants and positive orientation (the
/// jitter of any offending cell is halved until its elements are valid).
inline Mesh generate(const GenSpec& spec) {
  if (spec.nx < 2 || spec.ny < 2)
    throw std::invalid_argument("grid needs at least 2 nodes per side");
  if (!(spec.perturb >= 0.0 && spec.perturb < 0.5))
    throw std::invalid_argument("perturb must lie in [0, 0.5)");

  const int nx = spec.nx, ny = spec.ny;
  const int grid_nodes = nx * ny;
  auto id = [nx](int i, int j) { return j * nx + i; };

  SplitMix64 rng{spec.seed};

  // Jitter for interior grid nodes only; the rim stays on the lattice.
  std::vector<double> disp(2 * static_cast<std::size_t>(grid_nodes), 0.0);
  for (int j = 1; j < ny - 1; ++j)
    for (int i = 1; i < nx - 1; ++i) {
      disp[2 * id(i, j) + 0] = rng.next_signed() * spec.perturb;
      disp[2 * id(i, j) + 1] = rng.next_signed() * spec.perturb;
    }

  // Per-cell shape decisions, drawn after all jitter so both streams are
  // stable under changes to the other.
  std::vector<detail::CellPlan> cells;
  cells.reserve(static_cast<std::size_t>(nx - 1) * (ny - 1));
  int extra_nodes = 0;
  for (int j = 0; j + 1 < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      detail::CellPlan cell;
      cell.corner[0] = id(i, j);
      cell.corner[1] = id(i + 1, j);
      cell.corner[2] = id(i + 1, j + 1);
      cell.corner[3] = id(i, j + 1);
      switch (spec.kind) {
        case GridKind::TriGrid: cell.shape = detail::CellPlan::TwoTris; break;
        case GridKind::QuadGrid: cell.shape = detail::CellPlan::OneQuad; break;
        case GridKind::TriDominant:
          cell.shape = rng.next_double() < kTriDominantSplitFraction
                           ? detail::CellPlan::TriQuadSplit
                           : detail::CellPlan::TwoTris;
          break;
        case GridKind::QuadDominant:
          cell.shape = rng.next_double() < kQuadDominantQuadFraction
                           ? detail::CellPlan::OneQuad
                           : detail::CellPlan::TwoTris;
          break;
      }
      if (cell.shape == detail::CellPlan::TriQuadSplit) cell.mid_node = grid_nodes + extra_nodes++;
      cells.push_back(cell);
    }

  std::vector<double> damp(grid_nodes, 1.0);
  Mesh mesh;
  for (int round = 0; round < 64; ++round) {
    mesh = Mesh{};
    mesh.dim = 2;
    mesh.coords.resize(2 * static_cast<std::size_t>(grid_nodes + extra_nodes));
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const int n = id(i, j);
        mesh.coords[2 * n + 0] = i + damp[n] * disp[2 * n + 0];
        mesh.coords[2 * n + 1] = j + damp[n] * disp[2 * n + 1];
      }
    std::vector<int> cell_of_element;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const detail::CellPlan& cell = cells[c];
      const int a = cell.corner[0], b = cell.corner[1], cc = cell.corner[2], d = cell.corner[3];
      switch (cell.shape) {
        case detail::CellPlan::TwoTris:
          mesh.elements.push_back(Element::tri(a, b, cc));
          mesh.elements.push_back(Element::tri(a, cc, d));
          cell_of_element.insert(cell_of_element.end(), {int(c), int(c)});
          break;
        case detail::CellPlan::OneQuad:
          mesh.elements.push_back(Element::quad(a, b, cc, d));
          cell_of_element.push_back(int(c));
          break;
        case detail::CellPlan::TriQuadSplit: {
          const int m = cell.mid_node;
          mesh.coords[2 * m + 0] =
              mesh.coords[2 * a + 0] + kDiagonalSplitRatio * (mesh.coords[2 * cc + 0] - mesh.coords[2 * a + 0]);
          mesh.coords[2 * m + 1] =
              mesh.coords[2 * a + 1] + kDiagonalSplitRatio * (mesh.coords[2 * cc + 1] - mesh.coords[2 * a + 1]);
          mesh.elements.push_back(Element::tri(a, b, m));
          mesh.elements.push_back(Element::tri(a, m, d));
          mesh.elements.push_back(Element::quad(m, b, cc, d));
          cell_of_element.insert(cell_of_element.end(), {int(c), int(c), int(c)});
          break;
        }
      }
    }

    bool valid = true;
    for (std::size_t e = 0; e < mesh.elements.size(); ++e)
      if (signed_area2(mesh, mesh.elements[e]) <= 0.0) {
        valid = false;
        for (int corner : cells[cell_of_element[e]].corner) damp[corner] *= 0.5;
      }
    if (valid) break;
  }

  if (spec.lift != LiftKind::None) {
    const double cx = 0.5 * (nx - 1), cy = 0.5 * (ny - 1);
    const int n = mesh.node_count();
    std::vector<double> coords3(3 * static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const double x = mesh.coords[2 * i + 0], y = mesh.coords[2 * i + 1];
      double z = 0.0;
      if (spec.lift == LiftKind::SinxCosy)
        z = std::sin(x) * std::cos(y);
      else
        z = 0.05 * ((x - cx) * (x - cx) + (y - cy) * (y - cy));
      coords3[3 * i + 0] = x;
      coords3[3 * i + 1] = y;
      coords3[3 * i + 2] = z;
    }
    mesh.dim = 3;
    mesh.coords = std::move(coords3);
  }
  return mesh;
}

}  // namespace meshsmooth
