#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "surface.hpp"

namespace perisurf {

/// Triangulation of one periodic cell {-L/2 <= x1 <= L/2, zeta(x1) <= x2 <= H}.
/// Right-boundary nodes are paired with left-boundary nodes under x -> x - (L, 0).
struct CellMesh {
  enum Marker : unsigned { kSurface = 1u, kTop = 2u, kLeft = 4u, kRight = 8u };

  double period = 0.0;
  double height = 0.0;
  std::vector<Eigen::Vector2d> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<unsigned> markers;
  std::vector<int> partner;  // right node -> matching left node, -1 otherwise

  int node_count() const { return static_cast<int>(nodes.size()); }
  bool is(int node, Marker m) const { return (markers[node] & m) != 0u; }
  double left() const { return -0.5 * period; }

  /// Surface nodes sorted by x1 (both corners included).
  std::vector<int> surface_chain() const;
  /// Top nodes sorted by x1 (both corners included).
  std::vector<int> top_chain() const;

  /// Triangle containing x (cell-local) and its barycentric coordinates.
  std::optional<std::pair<int, Eigen::Vector3d>> locate(const Eigen::Vector2d& x) const;
  double max_edge() const;
};

struct MeshAudit {
  double pairing_error = 0.0;   // max |x_right - x_left - (L,0)|
  double surface_error = 0.0;   // max |x2 - zeta(x1)| over surface nodes
  double containment_violation = 0.0;
  int overshared_edges = 0;     // edges with more than two triangles
  int inverted_triangles = 0;
  double max_edge = 0.0;
  bool ok(double tol = 1e-12) const {
    return pairing_error <= tol && surface_error <= tol && containment_violation <= tol &&
           overshared_edges == 0 && inverted_triangles == 0;
  }
};

/// Column-structured mesh with node rows following x2 = zeta + t (H - zeta);
/// every quad is split along its shorter diagonal.
CellMesh build_cell_mesh(const PeriodicSurface& surface, double H, double target_h);
/// Same construction for an arbitrary period-periodic profile.
CellMesh build_cell_mesh(const std::function<double(double)>& zeta, double period, double H, double target_h);

MeshAudit audit_mesh(const CellMesh& mesh, const PeriodicSurface& surface);

/// Node CSV (id,x1,x2,marker) and element CSV (id,n0,n1,n2).
void write_mesh_csv(const CellMesh& mesh, std::ostream& nodes_out, std::ostream& elements_out);
CellMesh read_mesh_csv(std::istream& nodes_in, std::istream& elements_in, double period, double H);

}  // namespace perisurf
