#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "mae/error.hpp"
#include "mae/mesh.hpp"

namespace mae {
namespace {

TriMesh right_triangle() {
  return TriMesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}}, {true, true, true});
}

// Every undirected edge is used by one triangle (boundary) or two (interior).
void expect_conforming(const TriMesh& mesh) {
  std::map<std::pair<int, int>, int> uses;
  for (const auto& t : mesh.triangles())
    for (int e = 0; e < 3; ++e) {
      const int a = t[e], b = t[(e + 1) % 3];
      ++uses[{std::min(a, b), std::max(a, b)}];
    }
  for (const auto& [edge, count] : uses) {
    const bool on_boundary = mesh.is_boundary(edge.first) && mesh.is_boundary(edge.second) && count == 1;
    EXPECT_TRUE(count == 2 || on_boundary) << edge.first << "-" << edge.second;
  }
}

void expect_patch_identities(const TriMesh& mesh) {
  std::vector<double> patch(mesh.num_vertices(), 0.0);
  double total = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    EXPECT_GT(mesh.triangle_area(t), 0.0);
    total += mesh.triangle_area(t);
    for (int v : mesh.triangle(t)) patch[v] += mesh.triangle_area(t);
  }
  double sum = 0.0;
  for (int k = 0; k < mesh.num_vertices(); ++k) {
    EXPECT_NEAR(mesh.patch_area(k), patch[k], 1e-12 * patch[k]);
    sum += mesh.patch_area(k);
  }
  EXPECT_NEAR(sum, 3.0 * mesh.area(), 1e-12 * sum);
  EXPECT_NEAR(total, mesh.area(), 1e-12 * total);
}

TEST(TriMeshTest, RightTriangleGeometry) {
  const TriMesh m = right_triangle();
  EXPECT_DOUBLE_EQ(m.triangle_area(0), 0.5);
  EXPECT_DOUBLE_EQ(m.h(), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(m.area(), 0.5);
  EXPECT_EQ(m.num_interior(), 0);
  EXPECT_NEAR(m.min_angle_degrees(), 45.0, 1e-12);
}

TEST(TriMeshTest, InteriorIndexIsContiguous) {
  // Unit square with a centre vertex.
  const TriMesh m({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}},
                  {{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}},
                  {true, true, true, true, false});
  EXPECT_EQ(m.num_interior(), 1);
  EXPECT_EQ(m.interior_index(4), 0);
  EXPECT_EQ(m.interior_vertices(), std::vector<int>{4});
  for (int k = 0; k < 4; ++k) EXPECT_EQ(m.interior_index(k), -1);
  expect_patch_identities(m);
}

TEST(TriMeshTest, RejectsInvalidInput) {
  EXPECT_THROW(TriMesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 2, 1}}, {true, true, true}), InvalidArgument);
  EXPECT_THROW(TriMesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 3}}, {true, true, true}), InvalidArgument);
  EXPECT_THROW(TriMesh({{0, 0}, {1, 0}, {2, 0}}, {{0, 1, 2}}, {true, true, true}), InvalidArgument);
  // Boundary flags must match the topological boundary.
  EXPECT_THROW(TriMesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}}, {true, false, true}), InvalidArgument);
}

TEST(GenerateMesh, UnitDiskAtOneTenth) {
  const TriMesh m = generate_mesh(DomainSpec::unit_disk(), 0.1);
  EXPECT_GE(m.h(), 0.05);
  EXPECT_LE(m.h(), 0.15);
  for (int k = 0; k < m.num_vertices(); ++k)
    if (m.is_boundary(k)) EXPECT_NEAR(m.vertex(k).norm(), 1.0, 1e-12);
  EXPECT_NEAR(m.area(), std::numbers::pi, 0.02 * std::numbers::pi);
  EXPECT_GE(m.min_angle_degrees(), 20.0);
  expect_conforming(m);
  expect_patch_identities(m);
}

TEST(GenerateMesh, DiskAreaDeficitShrinksQuadratically) {
  const double coarse = std::numbers::pi - generate_mesh(DomainSpec::unit_disk(), 0.1).area();
  const double fine = std::numbers::pi - generate_mesh(DomainSpec::unit_disk(), 0.05).area();
  EXPECT_GT(coarse, 0.0);
  EXPECT_GT(fine, 0.0);
  EXPECT_NEAR(coarse / fine, 4.0, 1.0);
}

TEST(GenerateMesh, SuperellipseBoundaryOnCurve) {
  const TriMesh m = generate_mesh(DomainSpec::superellipse(2.5), 0.05);
  for (int k = 0; k < m.num_vertices(); ++k) {
    const Point& x = m.vertex(k);
    const double level = std::pow(std::abs(x.x()), 2.5) + std::pow(std::abs(x.y()), 2.5);
    if (m.is_boundary(k))
      EXPECT_NEAR(level, 1.0, 1e-12);
    else
      EXPECT_LT(level, 1.0);
  }
  EXPECT_GE(m.min_angle_degrees(), 20.0);
  EXPECT_LE(m.h(), 1.5 * 0.05);
  EXPECT_GE(m.h(), 0.5 * 0.05);
  expect_conforming(m);
  expect_patch_identities(m);
}

TEST(GenerateMesh, ShiftedCubicSuperellipse) {
  const TriMesh m = generate_mesh(DomainSpec::superellipse(3.0, 0.5, {0.5, 0.5}), 0.05);
  for (int k = 0; k < m.num_vertices(); ++k) {
    if (!m.is_boundary(k)) continue;
    const Point x = m.vertex(k);
    EXPECT_NEAR(std::pow(std::abs(x.x() - 0.5), 3) + std::pow(std::abs(x.y() - 0.5), 3), 0.125, 1e-12);
  }
  expect_conforming(m);
}

TEST(GenerateMesh, Deterministic) {
  const TriMesh a = generate_mesh(DomainSpec::unit_disk(), 0.1);
  const TriMesh b = generate_mesh(DomainSpec::unit_disk(), 0.1);
  ASSERT_EQ(a.num_vertices(), b.num_vertices());
  EXPECT_EQ(a.triangles(), b.triangles());
  for (int k = 0; k < a.num_vertices(); ++k) EXPECT_EQ(a.vertex(k), b.vertex(k));
}

TEST(GenerateMesh, RejectsInfeasibleInput) {
  EXPECT_THROW(generate_mesh(DomainSpec::unit_disk(), 2.0), InvalidArgument);
  EXPECT_THROW(generate_mesh(DomainSpec::unit_disk(), 0.0), InvalidArgument);
  EXPECT_THROW(generate_mesh(DomainSpec::superellipse(0.5), 0.1), InvalidArgument);
  EXPECT_THROW(generate_mesh(DomainSpec::superellipse(2.5, -1.0), 0.1), InvalidArgument);
}

TEST(MeshIo, RoundTripIsBitExact) {
  const TriMesh m = generate_mesh(DomainSpec::superellipse(2.5), 0.1);
  std::stringstream io;
  save_mesh(m, io);
  const TriMesh back = load_mesh(io);
  ASSERT_EQ(back.num_vertices(), m.num_vertices());
  EXPECT_EQ(back.triangles(), m.triangles());
  EXPECT_EQ(back.boundary_flags(), m.boundary_flags());
  for (int k = 0; k < m.num_vertices(); ++k) EXPECT_EQ(back.vertex(k), m.vertex(k));
  EXPECT_EQ(back.h(), m.h());
}

TEST(MeshIo, ParsesMinimalFile) {
  std::istringstream in("3 1\n0 0 1\n1 0 1\n0 1 1\n0 1 2\n");
  const TriMesh m = load_mesh(in);
  EXPECT_DOUBLE_EQ(m.triangle_area(0), 0.5);
}

int error_line(const std::string& text) {
  std::istringstream in(text);
  try {
    load_mesh(in);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

TEST(MeshIo, ErrorsNameTheLine) {
  // Index equal to the vertex count.
  EXPECT_EQ(error_line("3 1\n0 0 1\n1 0 1\n0 1 1\n0 1 3\n"), 5);
  // Clockwise triangle.
  EXPECT_EQ(error_line("3 1\n0 0 1\n1 0 1\n0 1 1\n0 2 1\n"), 5);
  // Malformed counts.
  EXPECT_EQ(error_line("3\n"), 1);
  EXPECT_EQ(error_line("2 1\n"), 1);
  // Bad flag and malformed coordinate.
  EXPECT_EQ(error_line("3 1\n0 0 1\n1 0 2\n0 1 1\n0 1 2\n"), 3);
  EXPECT_EQ(error_line("3 1\n0 0 1\n1 x 1\n0 1 1\n0 1 2\n"), 3);
  // Missing triangle and trailing data.
  EXPECT_EQ(error_line("3 1\n0 0 1\n1 0 1\n0 1 1\n"), 5);
  EXPECT_EQ(error_line("3 1\n0 0 1\n1 0 1\n0 1 1\n0 1 2\n7\n"), 6);
}

}  // namespace
}  // namespace mae
