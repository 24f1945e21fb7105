#include "perisurf/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "perisurf/errors.hpp"

namespace perisurf {

namespace {

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  return (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
}

std::vector<int> chain(const CellMesh& m, CellMesh::Marker marker) {
  std::vector<int> out;
  for (int n = 0; n < m.node_count(); ++n)
    if (m.is(n, marker)) out.push_back(n);
  std::sort(out.begin(), out.end(), [&](int a, int b) { return m.nodes[a].x() < m.nodes[b].x(); });
  return out;
}

void pair_boundaries(CellMesh& m) {
  m.partner.assign(m.nodes.size(), -1);
  std::vector<int> left, right;
  for (int n = 0; n < m.node_count(); ++n) {
    if (m.is(n, CellMesh::kLeft)) left.push_back(n);
    if (m.is(n, CellMesh::kRight)) right.push_back(n);
  }
  if (left.size() != right.size()) fail(ErrorKind::Geometry, "left/right boundary node counts differ");
  auto by_y = [&](int a, int b) { return m.nodes[a].y() < m.nodes[b].y(); };
  std::sort(left.begin(), left.end(), by_y);
  std::sort(right.begin(), right.end(), by_y);
  for (std::size_t i = 0; i < left.size(); ++i) m.partner[right[i]] = left[i];
}

}  // namespace

std::vector<int> CellMesh::surface_chain() const { return chain(*this, kSurface); }
std::vector<int> CellMesh::top_chain() const { return chain(*this, kTop); }

std::optional<std::pair<int, Eigen::Vector3d>> CellMesh::locate(const Eigen::Vector2d& x) const {
  const double eps = 1e-12;
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    const auto& tri = triangles[t];
    const Eigen::Vector2d &a = nodes[tri[0]], &b = nodes[tri[1]], &c = nodes[tri[2]];
    if (x.x() < std::min({a.x(), b.x(), c.x()}) - eps || x.x() > std::max({a.x(), b.x(), c.x()}) + eps) continue;
    if (x.y() < std::min({a.y(), b.y(), c.y()}) - eps || x.y() > std::max({a.y(), b.y(), c.y()}) + eps) continue;
    const double area = cross(a, b, c);
    Eigen::Vector3d lam(cross(x, b, c) / area, cross(a, x, c) / area, cross(a, b, x) / area);
    if (lam.minCoeff() >= -1e-10) return std::make_pair(static_cast<int>(t), lam);
  }
  return std::nullopt;
}

double CellMesh::max_edge() const {
  double e = 0.0;
  for (const auto& t : triangles)
    for (int i = 0; i < 3; ++i) e = std::max(e, (nodes[t[i]] - nodes[t[(i + 1) % 3]]).norm());
  return e;
}

CellMesh build_cell_mesh(const PeriodicSurface& surface, double H, double target_h) {
  if (!(H > surface.sup_height()))
    fail(ErrorKind::Geometry, "artificial boundary must lie strictly above the surface");
  return build_cell_mesh([&](double x) { return surface(x); }, surface.period(), H, target_h);
}

CellMesh build_cell_mesh(const std::function<double(double)>& surface, double period, double H, double target_h) {
  if (!(target_h > 0.0)) fail(ErrorKind::Config, "mesh size must be positive");
  CellMesh m;
  m.period = period;
  m.height = H;
  const int nx = std::max(4, static_cast<int>(std::ceil(m.period / target_h)));
  std::vector<double> z(nx + 1);
  for (int i = 0; i < nx; ++i) z[i] = surface(m.left() + m.period * i / nx);
  z[nx] = z[0];
  const double lo = *std::min_element(z.begin(), z.end());
  if (!(H > *std::max_element(z.begin(), z.end())))
    fail(ErrorKind::Geometry, "artificial boundary must lie strictly above the surface");
  const int ny = std::max(2, static_cast<int>(std::ceil((H - lo) / target_h)));
  const int stride = nx + 1;
  m.nodes.reserve(stride * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      const double x1 = m.left() + m.period * i / nx;
      const double t = static_cast<double>(j) / ny;
      const double x2 = (j == ny) ? H : z[i] + t * (H - z[i]);
      m.nodes.emplace_back(x1, x2);
      unsigned mk = 0;
      if (j == 0) mk |= CellMesh::kSurface;
      if (j == ny) mk |= CellMesh::kTop;
      if (i == 0) mk |= CellMesh::kLeft;
      if (i == nx) mk |= CellMesh::kRight;
      m.markers.push_back(mk);
    }
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int a = i + j * stride, b = a + 1, c = a + stride + 1, d = a + stride;
      if ((m.nodes[a] - m.nodes[c]).norm() <= (m.nodes[b] - m.nodes[d]).norm()) {
        m.triangles.push_back({a, b, c});
        m.triangles.push_back({a, c, d});
      } else {
        m.triangles.push_back({a, b, d});
        m.triangles.push_back({b, c, d});
      }
    }
  pair_boundaries(m);
  return m;
}

MeshAudit audit_mesh(const CellMesh& m, const PeriodicSurface& surface) {
  MeshAudit a;
  for (int n = 0; n < m.node_count(); ++n) {
    const auto& x = m.nodes[n];
    if (m.partner[n] >= 0) {
      const Eigen::Vector2d d = x - m.nodes[m.partner[n]] - Eigen::Vector2d(m.period, 0.0);
      a.pairing_error = std::max(a.pairing_error, d.norm());
    }
    const double z = surface(x.x());
    if (m.is(n, CellMesh::kSurface)) a.surface_error = std::max(a.surface_error, std::abs(x.y() - z));
    a.containment_violation = std::max({a.containment_violation, z - x.y(), x.y() - m.height});
  }
  std::map<std::pair<int, int>, int> edges;
  for (const auto& t : m.triangles) {
    if (cross(m.nodes[t[0]], m.nodes[t[1]], m.nodes[t[2]]) <= 0.0) ++a.inverted_triangles;
    for (int i = 0; i < 3; ++i) {
      const int u = t[i], v = t[(i + 1) % 3];
      ++edges[{std::min(u, v), std::max(u, v)}];
    }
  }
  for (const auto& [e, count] : edges)
    if (count > 2) ++a.overshared_edges;
  a.max_edge = m.max_edge();
  return a;
}

void write_mesh_csv(const CellMesh& m, std::ostream& nodes_out, std::ostream& elements_out) {
  nodes_out.precision(17);
  nodes_out << "id,x1,x2,marker\n";
  for (int n = 0; n < m.node_count(); ++n)
    nodes_out << n << ',' << m.nodes[n].x() << ',' << m.nodes[n].y() << ',' << m.markers[n] << '\n';
  elements_out << "id,n0,n1,n2\n";
  for (std::size_t t = 0; t < m.triangles.size(); ++t)
    elements_out << t << ',' << m.triangles[t][0] << ',' << m.triangles[t][1] << ',' << m.triangles[t][2] << '\n';
}

CellMesh read_mesh_csv(std::istream& nodes_in, std::istream& elements_in, double period, double H) {
  CellMesh m;
  m.period = period;
  m.height = H;
  std::string line;
  std::getline(nodes_in, line);
  while (std::getline(nodes_in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    int id;
    double x, y;
    unsigned mk;
    if (!(ss >> id >> x >> y >> mk) || id != m.node_count()) fail(ErrorKind::Io, "malformed node CSV row: " + line);
    m.nodes.emplace_back(x, y);
    m.markers.push_back(mk);
  }
  std::getline(elements_in, line);
  while (std::getline(elements_in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    int id, a, b, c;
    if (!(ss >> id >> a >> b >> c)) fail(ErrorKind::Io, "malformed element CSV row: " + line);
    m.triangles.push_back({a, b, c});
  }
  pair_boundaries(m);
  return m;
}

}  // namespace perisurf
