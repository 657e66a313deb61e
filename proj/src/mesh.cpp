#include "mae/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <utility>

#include "mae/error.hpp"

namespace mae {

namespace {

constexpr double kPi = std::numbers::pi;

// Point spacing as a multiple of target_h. target_h is read as the typical
// edge length; after smoothing the longest edge comes out near 1.4 target_h.
constexpr double kSpacingFactor = 1.087;

double edge_length(const Point& a, const Point& b) { return (a - b).norm(); }

double angle_at(const Point& apex, const Point& p, const Point& q) {
  const Point u = p - apex;
  const Point v = q - apex;
  return std::atan2(std::abs(u.x() * v.y() - u.y() * v.x()), u.dot(v));
}

// Arc-length parametrization of the boundary curve, shared by every scaled
// ring since all rings are homothetic copies of the boundary.
class ArcLengthTable {
 public:
  explicit ArcLengthTable(const DomainSpec& domain) : domain_(domain) {
    constexpr int kSamples = 1 << 14;
    theta_.resize(kSamples + 1);
    length_.resize(kSamples + 1);
    Point prev = point(0.0);
    length_[0] = 0.0;
    for (int i = 0; i <= kSamples; ++i) {
      theta_[i] = 2.0 * kPi * i / kSamples;
      const Point p = point(theta_[i]);
      if (i > 0) length_[i] = length_[i - 1] + edge_length(prev, p);
      prev = p;
    }
  }

  double perimeter() const { return length_.back(); }

  /// Angle at which the normalized arc length equals t in [0, 1).
  double angle(double t) const {
    t -= std::floor(t);
    const double target = t * perimeter();
    const auto it = std::upper_bound(length_.begin(), length_.end(), target);
    const auto i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - length_.begin()));
    if (i >= length_.size()) return 2.0 * kPi;
    const double s = (target - length_[i - 1]) / (length_[i] - length_[i - 1]);
    return theta_[i - 1] + s * (theta_[i] - theta_[i - 1]);
  }

 private:
  Point point(double theta) const {
    return domain_.boundary_distance(theta) * Point(std::cos(theta), std::sin(theta));
  }

  const DomainSpec& domain_;
  std::vector<double> theta_;
  std::vector<double> length_;
};

struct Ring {
  std::vector<int> ids;
  std::vector<double> params;  // normalized arc-length positions, increasing
};

// Triangulates the annulus between two consecutive rings by merging their
// parameter sequences.
void stitch(const Ring& inner, const Ring& outer, std::vector<Triangle>& tris) {
  const int m = static_cast<int>(inner.ids.size());
  const int n = static_cast<int>(outer.ids.size());
  auto param = [](const Ring& r, int i) {
    const int size = static_cast<int>(r.ids.size());
    return r.params[i % size] + static_cast<double>(i / size);
  };
  int i = 0;
  int j = 0;
  while (i < m || j < n) {
    const int a = inner.ids[i % m];
    const int b = outer.ids[j % n];
    const bool advance_inner = j >= n || (i < m && param(inner, i + 1) < param(outer, j + 1));
    if (advance_inner) {
      tris.push_back({a, b, inner.ids[(i + 1) % m]});
      ++i;
    } else {
      tris.push_back({a, b, outer.ids[(j + 1) % n]});
      ++j;
    }
  }
}

void fan(int center, const Ring& ring, std::vector<Triangle>& tris) {
  const int n = static_cast<int>(ring.ids.size());
  for (int j = 0; j < n; ++j) tris.push_back({center, ring.ids[j], ring.ids[(j + 1) % n]});
}

// Moves every interior vertex to the area-weighted centroid of its patch.
void lloyd_pass(std::vector<Point>& pts, const std::vector<Triangle>& tris,
                const std::vector<bool>& boundary) {
  std::vector<Point> acc(pts.size(), Point::Zero());
  std::vector<double> weight(pts.size(), 0.0);
  for (const auto& t : tris) {
    const double a = signed_area(pts[t[0]], pts[t[1]], pts[t[2]]);
    const Point c = (pts[t[0]] + pts[t[1]] + pts[t[2]]) / 3.0;
    for (int v : t) {
      acc[v] += a * c;
      weight[v] += a;
    }
  }
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (!boundary[k] && weight[k] > 0.0) pts[k] = acc[k] / weight[k];
  }
}

// Flips interior edges violating the empty-circle condition until none do.
void delaunay_flips(const std::vector<Point>& pts, std::vector<Triangle>& tris) {
  for (int sweep = 0; sweep < 100; ++sweep) {
    std::map<std::pair<int, int>, std::pair<int, int>> edge_tris;
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
      for (int e = 0; e < 3; ++e) {
        const int a = tris[t][e];
        const int b = tris[t][(e + 1) % 3];
        const auto key = std::minmax(a, b);
        auto [it, fresh] = edge_tris.try_emplace({key.first, key.second}, t, -1);
        if (!fresh) it->second.second = t;
      }
    }
    std::vector<bool> touched(tris.size(), false);
    int flips = 0;
    for (const auto& [edge, pair] : edge_tris) {
      const auto [t1, t2] = pair;
      if (t2 < 0 || touched[t1] || touched[t2]) continue;
      const auto opposite = [&](int t) {
        for (int v : tris[t])
          if (v != edge.first && v != edge.second) return v;
        return -1;
      };
      const int c = opposite(t1);
      const int d = opposite(t2);
      const double sum = angle_at(pts[c], pts[edge.first], pts[edge.second]) +
                         angle_at(pts[d], pts[edge.first], pts[edge.second]);
      if (sum <= kPi + 1e-10) continue;
      // New triangles (c, d, x) for x in the edge, oriented counterclockwise.
      Triangle n1{c, d, edge.first};
      Triangle n2{d, c, edge.second};
      if (signed_area(pts[n1[0]], pts[n1[1]], pts[n1[2]]) < 0) std::swap(n1[0], n1[1]);
      if (signed_area(pts[n2[0]], pts[n2[1]], pts[n2[2]]) < 0) std::swap(n2[0], n2[1]);
      if (signed_area(pts[n1[0]], pts[n1[1]], pts[n1[2]]) <= 0 ||
          signed_area(pts[n2[0]], pts[n2[1]], pts[n2[2]]) <= 0)
        continue;
      tris[t1] = n1;
      tris[t2] = n2;
      touched[t1] = touched[t2] = true;
      ++flips;
    }
    if (flips == 0) return;
  }
}

}  // namespace

void DomainSpec::validate() const {
  if (!(exponent > 1.0)) throw InvalidArgument("domain exponent must be > 1 (convex domain)");
  if (!(radius > 0.0)) throw InvalidArgument("domain radius must be positive");
  if (kind == DomainKind::UnitDisk && exponent != 2.0)
    throw InvalidArgument("disk domain requires exponent 2");
}

double DomainSpec::boundary_distance(double theta) const {
  if (kind == DomainKind::UnitDisk) return radius;
  const double c = std::abs(std::cos(theta));
  const double s = std::abs(std::sin(theta));
  return radius / std::pow(std::pow(c, exponent) + std::pow(s, exponent), 1.0 / exponent);
}

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

TriMesh::TriMesh(std::vector<Point> vertices, std::vector<Triangle> triangles,
                 std::vector<bool> boundary)
    : vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      boundary_(std::move(boundary)) {
  const int nv = num_vertices();
  if (static_cast<int>(boundary_.size()) != nv)
    throw InvalidArgument("boundary flag count does not match vertex count");
  if (triangles_.empty()) throw InvalidArgument("mesh has no triangles");

  triangle_area_.resize(triangles_.size());
  patch_area_.assign(nv, 0.0);
  std::map<std::pair<int, int>, int> directed;
  for (int t = 0; t < num_triangles(); ++t) {
    const auto& tri = triangles_[t];
    for (int v : tri) {
      if (v < 0 || v >= nv)
        throw InvalidArgument("triangle " + std::to_string(t) + " references vertex " +
                              std::to_string(v) + " out of range");
    }
    const double a = signed_area(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
    if (!(a > 0.0))
      throw InvalidArgument("triangle " + std::to_string(t) + " has non-positive area");
    triangle_area_[t] = a;
    area_ += a;
    for (int e = 0; e < 3; ++e) {
      const int from = tri[e];
      const int to = tri[(e + 1) % 3];
      if (++directed[{from, to}] > 1)
        throw InvalidArgument("non-conforming mesh: edge (" + std::to_string(from) + ", " +
                              std::to_string(to) + ") used twice with the same orientation");
      patch_area_[from] += a;
      h_ = std::max(h_, edge_length(vertices_[from], vertices_[to]));
    }
  }

  std::vector<bool> on_boundary(nv, false);
  for (const auto& [edge, count] : directed) {
    if (!directed.contains({edge.second, edge.first}))
      on_boundary[edge.first] = on_boundary[edge.second] = true;
  }
  interior_index_.assign(nv, -1);
  for (int k = 0; k < nv; ++k) {
    if (patch_area_[k] == 0.0)
      throw InvalidArgument("vertex " + std::to_string(k) + " belongs to no triangle");
    if (on_boundary[k] != boundary_[k])
      throw InvalidArgument("boundary flag of vertex " + std::to_string(k) +
                            " disagrees with the mesh topology");
    if (!boundary_[k]) {
      interior_index_[k] = static_cast<int>(interior_vertices_.size());
      interior_vertices_.push_back(k);
    }
  }
}

double TriMesh::min_angle_degrees() const {
  double smallest = 180.0;
  for (const auto& t : triangles_) {
    for (int e = 0; e < 3; ++e) {
      const double a = angle_at(vertices_[t[e]], vertices_[t[(e + 1) % 3]], vertices_[t[(e + 2) % 3]]);
      smallest = std::min(smallest, a * 180.0 / kPi);
    }
  }
  return smallest;
}

TriMesh generate_mesh(const DomainSpec& domain, double target_h) {
  domain.validate();
  if (!(target_h > 0.0)) throw InvalidArgument("target_h must be positive");

  const ArcLengthTable arc(domain);
  const double spacing = kSpacingFactor * target_h;
  const int boundary_points = static_cast<int>(std::lround(arc.perimeter() / spacing));
  if (boundary_points < 8)
    throw InvalidArgument("target_h too large for the domain: boundary polygon would have " +
                          std::to_string(boundary_points) + " < 8 segments");

  const double mean_radius = arc.perimeter() / (2.0 * kPi);
  const int rings = std::max(1, static_cast<int>(std::lround(mean_radius / (spacing * std::sqrt(3.0) / 2.0))));

  std::vector<Point> pts{domain.center};
  std::vector<bool> boundary{false};
  std::vector<Triangle> tris;

  Ring previous{{0}, {0.0}};
  for (int k = 1; k <= rings; ++k) {
    const double scale = static_cast<double>(k) / rings;
    const int n = k == rings ? boundary_points
                             : std::max(6, static_cast<int>(std::lround(scale * boundary_points)));
    const double offset = (k % 2 == 0) ? 0.5 / n : 0.0;
    Ring ring;
    for (int j = 0; j < n; ++j) {
      const double t = offset + static_cast<double>(j) / n;
      const double theta = arc.angle(t);
      const double rho = scale * domain.boundary_distance(theta);
      ring.ids.push_back(static_cast<int>(pts.size()));
      ring.params.push_back(t);
      pts.push_back(domain.center + rho * Point(std::cos(theta), std::sin(theta)));
      boundary.push_back(k == rings);
    }
    if (k == 1)
      fan(0, ring, tris);
    else
      stitch(previous, ring, tris);
    previous = std::move(ring);
  }

  delaunay_flips(pts, tris);
  lloyd_pass(pts, tris, boundary);
  delaunay_flips(pts, tris);

  TriMesh mesh(std::move(pts), std::move(tris), std::move(boundary));
  if (mesh.h() < 0.5 * target_h || mesh.h() > 1.5 * target_h)
    throw InvalidArgument("generated mesh size h = " + std::to_string(mesh.h()) +
                          " is outside [0.5, 1.5] x target_h");
  return mesh;
}

}  // namespace mae
