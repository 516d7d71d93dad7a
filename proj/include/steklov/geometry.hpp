#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace steklov {

using Point = Eigen::Vector2d;

/// Raised when a triangulation cannot be produced; carries the offending location.
class MeshingError : public std::runtime_error {
 public:
  MeshingError(const std::string& what, Point location)
      : std::runtime_error(what), location_(std::move(location)) {}
  const Point& location() const { return location_; }

 private:
  Point location_;
};

/// Declared regularity of a boundary curve: C^{1+kappa}, or C^infinity when
/// `infinitely_smooth` is set.
struct Smoothness {
  bool infinitely_smooth = true;
  double kappa = 1.0;
};

struct DomainCheck {
  bool closed = false;
  bool simple = false;
  double min_speed = 0.0;
  double closure_gap = 0.0;
  bool ok() const { return closed && simple && min_speed > 0.0; }
};

/// A bounded planar domain described by a closed parametric boundary curve
/// s in [0, 2pi) -> R^2, traversed counterclockwise.
class SmoothDomain {
 public:
  using CurveFn = std::function<Point(double)>;

  SmoothDomain(std::string name, CurveFn curve, CurveFn derivative, Smoothness smoothness);

  const std::string& name() const { return name_; }
  const Smoothness& smoothness() const { return smoothness_; }
  static constexpr int dimension() { return 2; }

  Point point(double s) const { return curve_(s); }
  Point derivative(double s) const { return derivative_(s); }

  /// Total boundary length (periodic trapezoid, spectrally accurate for smooth curves).
  double length() const { return length_; }

  /// Arclength between parameters s0 <= s1 by composite Gauss-Legendre quadrature.
  double arclength(double s0, double s1) const;

  /// Closure, tangent and simplicity checks on `samples` equispaced parameters.
  DomainCheck check(int samples = 4096) const;

  /// Largest distance between two of `samples` boundary points.
  double diameter(int samples = 512) const;

 private:
  std::string name_;
  CurveFn curve_;
  CurveFn derivative_;
  Smoothness smoothness_;
  double length_ = 0.0;
};

SmoothDomain make_disk(double radius);

/// r(s) = base_radius * (1 + amplitude * cos(lobes * s)).
SmoothDomain make_smooth_star(double base_radius, double amplitude, int lobes);

/// Conforming triangulation whose boundary ring lies on the domain curve.
struct Mesh {
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;
  /// Boundary vertex ids in counterclockwise order.
  std::vector<int> boundary_ring;
  /// Curve parameter of each ring vertex.
  std::vector<double> boundary_params;
  /// Arclength of the curve piece between ring[i] and ring[i+1] (cyclic).
  std::vector<double> segment_lengths;
  /// Arclength quadrature weight of each ring vertex: half of each adjacent piece.
  std::vector<double> boundary_weights;
  double h = 0.0;

  std::size_t boundary_size() const { return boundary_ring.size(); }
  double triangle_area(std::size_t t) const;
  double total_area() const;
  std::vector<Point> boundary_points() const;
};

struct MeshCheck {
  bool positively_oriented = true;
  bool conforming = true;
  bool boundary_on_curve = true;
  bool weights_consistent = true;
  bool ring_orientation = true;
  double max_curve_distance = 0.0;
  double weight_sum_error = 0.0;
  std::string message;
  bool ok() const {
    return positively_oriented && conforming && boundary_on_curve && weights_consistent &&
           ring_orientation;
  }
};

/// Validates the Mesh invariants against the domain it was built from.
MeshCheck check_mesh(const Mesh& mesh, const SmoothDomain& domain);

/// Ring-based triangulation of a domain that is star-shaped about the origin
/// with monotone polar angle along the curve. Rings of vertices at fractions
/// rho of the boundary curve are stitched pairwise.
///
/// With 0 < boundary_h < target_h the rings next to the boundary start at
/// spacing boundary_h and coarsen geometrically (ratio 1.15) to target_h, which
/// resolves high boundary modes without refining the whole interior.
Mesh triangulate(const SmoothDomain& domain, double target_h, double boundary_h = 0.0);

}  // namespace steklov
