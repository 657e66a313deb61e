#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

namespace mae {

using Point = Eigen::Vector2d;
using Triangle = std::array<int, 3>;

enum class DomainKind { UnitDisk, Superellipse };

/// Convex domain {x : |x1-c1|^p + |x2-c2|^p < r^p}. The disk is p = 2.
struct DomainSpec {
  DomainKind kind = DomainKind::UnitDisk;
  double exponent = 2.0;
  Point center = Point::Zero();
  double radius = 1.0;

  static DomainSpec unit_disk() { return {}; }
  static DomainSpec superellipse(double exponent, double radius = 1.0,
                                 Point center = Point::Zero()) {
    return {DomainKind::Superellipse, exponent, center, radius};
  }

  /// Throws InvalidArgument unless exponent > 1 and radius > 0.
  void validate() const;

  /// Distance from the center to the boundary along direction angle theta.
  double boundary_distance(double theta) const;
};

/// Conforming P1 triangulation with the geometric data the discretization
/// needs. Immutable after construction.
class TriMesh {
 public:
  /// Validates connectivity and orientation, then computes derived fields.
  /// Throws InvalidArgument on bad indices, non-positive areas or
  /// non-conforming edges.
  TriMesh(std::vector<Point> vertices, std::vector<Triangle> triangles,
          std::vector<bool> boundary);

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }
  int num_interior() const { return static_cast<int>(interior_vertices_.size()); }

  const std::vector<Point>& vertices() const { return vertices_; }
  const Point& vertex(int k) const { return vertices_[k]; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const Triangle& triangle(int t) const { return triangles_[t]; }
  bool is_boundary(int k) const { return boundary_[k]; }
  const std::vector<bool>& boundary_flags() const { return boundary_; }

  /// Longest edge length.
  double h() const { return h_; }
  double area() const { return area_; }
  double triangle_area(int t) const { return triangle_area_[t]; }
  /// |omega_k|: total area of the triangles sharing vertex k.
  double patch_area(int k) const { return patch_area_[k]; }
  const std::vector<double>& patch_areas() const { return patch_area_; }

  /// Contiguous index of vertex k among interior vertices, or -1.
  int interior_index(int k) const { return interior_index_[k]; }
  const std::vector<int>& interior_vertices() const { return interior_vertices_; }

  /// Smallest interior angle over all triangles, in degrees.
  double min_angle_degrees() const;

 private:
  std::vector<Point> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<bool> boundary_;

  double h_ = 0.0;
  double area_ = 0.0;
  std::vector<double> triangle_area_;
  std::vector<double> patch_area_;
  std::vector<int> interior_index_;
  std::vector<int> interior_vertices_;
};

/// Signed area of the triangle (a, b, c); positive when counterclockwise.
double signed_area(const Point& a, const Point& b, const Point& c);

/// Quasi-uniform triangulation of the inscribed polygon of `domain` with
/// typical edge length target_h. The longest edge, reported as mesh.h(),
/// lies in [0.5, 1.5] x target_h (about 1.4 x in practice). Deterministic.
TriMesh generate_mesh(const DomainSpec& domain, double target_h);

void save_mesh(const TriMesh& mesh, std::ostream& out);
void save_mesh(const TriMesh& mesh, const std::filesystem::path& path);

/// Throws ParseError naming the offending line.
TriMesh load_mesh(std::istream& in);
TriMesh load_mesh(const std::filesystem::path& path);

}  // namespace mae
