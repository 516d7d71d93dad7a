#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "steklov/geometry.hpp"
#include "support.hpp"

namespace steklov {
namespace {

using testing::kPi;

TEST(MakeDisk, UnitCirclePoints) {
  const SmoothDomain disk = make_disk(1.0);
  EXPECT_NEAR((disk.point(0.0) - Point(1.0, 0.0)).norm(), 0.0, 1e-15);
  EXPECT_NEAR((disk.point(kPi / 2) - Point(0.0, 1.0)).norm(), 0.0, 1e-15);
  EXPECT_NEAR(disk.length(), 2 * kPi, 1e-10);
}

TEST(MakeDisk, RadiusTwoLengthByQuadrature) {
  const SmoothDomain disk = make_disk(2.0);
  EXPECT_NEAR(disk.length(), 4 * kPi, 1e-10);
  EXPECT_NEAR(disk.arclength(0.0, kPi), 2 * kPi, 1e-10);
}

TEST(MakeDisk, RejectsNonPositiveRadius) {
  EXPECT_THROW(make_disk(0.0), std::invalid_argument);
  EXPECT_THROW(make_disk(-1.0), std::invalid_argument);
}

TEST(MakeSmoothStar, ZeroAmplitudeIsTheDisk) {
  const SmoothDomain star = make_smooth_star(1.5, 0.0, 3);
  const SmoothDomain disk = make_disk(1.5);
  for (int k = 0; k < 1000; ++k) {
    const double s = 2 * kPi * k / 1000.0;
    EXPECT_LE((star.point(s) - disk.point(s)).norm(), 1e-12);
  }
}

TEST(MakeSmoothStar, RadialExtremes) {
  const SmoothDomain star = make_smooth_star(1.0, 0.2, 3);
  double lo = 1e9, hi = 0.0;
  for (int k = 0; k < 6000; ++k) {
    const double r = star.point(2 * kPi * k / 6000.0).norm();
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  EXPECT_NEAR(lo, 0.8, 1e-9);
  EXPECT_NEAR(hi, 1.2, 1e-9);
}

TEST(MakeSmoothStar, SimpleClosedCurve) {
  const DomainCheck check = make_smooth_star(1.0, 0.2, 3).check(4096);
  EXPECT_TRUE(check.closed);
  EXPECT_TRUE(check.simple);
  EXPECT_GT(check.min_speed, 0.0);
  EXPECT_TRUE(check.ok());
}

TEST(MakeSmoothStar, RejectsBadParameters) {
  EXPECT_THROW(make_smooth_star(1.0, 1.0, 3), std::invalid_argument);
  EXPECT_THROW(make_smooth_star(1.0, -0.1, 3), std::invalid_argument);
  EXPECT_THROW(make_smooth_star(0.0, 0.2, 3), std::invalid_argument);
  EXPECT_THROW(make_smooth_star(1.0, 0.2, -1), std::invalid_argument);
}

TEST(Triangulate, DiskAreaWithinTwoPercent) {
  const SmoothDomain disk = make_disk(1.0);
  const Mesh mesh = triangulate(disk, 0.2);
  EXPECT_NEAR(mesh.total_area(), kPi, 0.02 * kPi);
  EXPECT_TRUE(check_mesh(mesh, disk).ok()) << check_mesh(mesh, disk).message;
}

TEST(Triangulate, MeshSizeTracksTarget) {
  for (double h : {0.2, 0.1, 0.05}) {
    const Mesh mesh = triangulate(make_disk(1.0), h);
    EXPECT_LE(mesh.h, 1.5 * h) << "target " << h;
    EXPECT_GT(mesh.h, 0.5 * h) << "target " << h;
  }
}

TEST(Triangulate, BoundaryCountDoublesUnderHalving) {
  const SmoothDomain disk = make_disk(1.0);
  const double coarse = static_cast<double>(triangulate(disk, 0.1).boundary_size());
  const double fine = static_cast<double>(triangulate(disk, 0.05).boundary_size());
  EXPECT_GT(fine / coarse, 1.8);
  EXPECT_LT(fine / coarse, 2.2);
}

TEST(Triangulate, WeightsPartitionTheBoundary) {
  for (const SmoothDomain& domain : {make_disk(1.0), make_disk(2.0), make_smooth_star(1.0, 0.2, 3)}) {
    for (double h : {0.1, 0.05}) {
      const Mesh mesh = triangulate(domain, h);
      double total = 0.0;
      for (double w : mesh.boundary_weights) total += w;
      EXPECT_NEAR(total, domain.length(), 1e-8) << domain.name() << " h=" << h;
      double pieces = 0.0;
      for (double l : mesh.segment_lengths) pieces += l;
      EXPECT_NEAR(pieces, domain.length(), 1e-8) << domain.name() << " h=" << h;
    }
  }
}

TEST(Triangulate, AreaErrorDecreasesMonotonically) {
  const SmoothDomain disk = make_disk(1.0);
  double previous = 1e9;
  for (double h : {0.2, 0.1, 0.05}) {
    const double err = std::abs(triangulate(disk, h).total_area() - kPi);
    EXPECT_LT(err, previous) << "h=" << h;
    previous = err;
  }
}

TEST(Triangulate, RingIsCounterclockwise) {
  for (const SmoothDomain& domain : {make_disk(1.0), make_smooth_star(1.0, 0.2, 3)}) {
    const Mesh mesh = triangulate(domain, 0.08);
    const std::vector<Point> pts = mesh.boundary_points();
    const std::size_t m = pts.size();
    double twice_area = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const Point a = pts[i], b = pts[(i + 1) % m];
      twice_area += a.x() * b.y() - a.y() * b.x();
    }
    EXPECT_NEAR(0.5 * twice_area, mesh.total_area(), 1e-10) << domain.name();
  }
}

TEST(Triangulate, TrianglesPositivelyOriented) {
  const Mesh mesh = triangulate(make_smooth_star(1.0, 0.2, 3), 0.08);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) EXPECT_GT(mesh.triangle_area(t), 0.0);
  EXPECT_TRUE(check_mesh(mesh, make_smooth_star(1.0, 0.2, 3)).ok());
}

TEST(Triangulate, BoundaryVerticesLieOnTheCurve) {
  const SmoothDomain star = make_smooth_star(1.0, 0.2, 3);
  const Mesh mesh = triangulate(star, 0.08);
  for (std::size_t i = 0; i < mesh.boundary_size(); ++i) {
    const Point p = mesh.vertices[static_cast<std::size_t>(mesh.boundary_ring[i])];
    EXPECT_LE((p - star.point(mesh.boundary_params[i])).norm(), 1e-12);
  }
}

TEST(Triangulate, GradedBoundarySpacing) {
  const SmoothDomain disk = make_disk(1.0);
  const Mesh graded = triangulate(disk, 0.1, 0.025);
  const Mesh uniform = triangulate(disk, 0.1);
  EXPECT_GT(graded.boundary_size(), 3 * uniform.boundary_size());
  EXPECT_TRUE(check_mesh(graded, disk).ok()) << check_mesh(graded, disk).message;
  EXPECT_NEAR(graded.total_area(), kPi, 0.01 * kPi);
}

TEST(Triangulate, RejectsBadTarget) {
  EXPECT_THROW(triangulate(make_disk(1.0), 0.0), std::invalid_argument);
  EXPECT_THROW(triangulate(make_disk(1.0), 5.0), std::invalid_argument);
}

TEST(Triangulate, NonStarShapedCurveRaisesMeshingError) {
  // A disk centred away from the origin is not star-shaped about the origin.
  const SmoothDomain shifted(
      "shifted", [](double s) { return Point(3.0 + std::cos(s), std::sin(s)); },
      [](double s) { return Point(-std::sin(s), std::cos(s)); }, Smoothness{});
  try {
    triangulate(shifted, 0.2);
    FAIL() << "expected MeshingError";
  } catch (const MeshingError& e) {
    EXPECT_TRUE(e.location().allFinite());
  }
}

TEST(MeshSerialisation, BoundaryPointsMatchRing) {
  const Mesh mesh = triangulate(make_disk(1.0), 0.2);
  const auto pts = mesh.boundary_points();
  ASSERT_EQ(pts.size(), mesh.boundary_size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    EXPECT_EQ(pts[i], mesh.vertices[static_cast<std::size_t>(mesh.boundary_ring[i])]);
}

}  // namespace
}  // namespace steklov
