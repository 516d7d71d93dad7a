#include "steklov/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace steklov {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

// Proper or touching intersection of closed segments [p1,p2] and [q1,q2].
bool segments_intersect(const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
  const double d1 = cross(p2 - p1, q1 - p1);
  const double d2 = cross(p2 - p1, q2 - p1);
  const double d3 = cross(q2 - q1, p1 - q1);
  const double d4 = cross(q2 - q1, p2 - q1);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  auto on_segment = [](const Point& a, const Point& b, const Point& c) {
    return std::min(a.x(), b.x()) <= c.x() && c.x() <= std::max(a.x(), b.x()) &&
           std::min(a.y(), b.y()) <= c.y() && c.y() <= std::max(a.y(), b.y());
  };
  if (d1 == 0 && on_segment(p1, p2, q1)) return true;
  if (d2 == 0 && on_segment(p1, p2, q2)) return true;
  if (d3 == 0 && on_segment(q1, q2, p1)) return true;
  if (d4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

}  // namespace

SmoothDomain::SmoothDomain(std::string name, CurveFn curve, CurveFn derivative,
                           Smoothness smoothness)
    : name_(std::move(name)),
      curve_(std::move(curve)),
      derivative_(std::move(derivative)),
      smoothness_(smoothness) {
  if (!smoothness_.infinitely_smooth && !(smoothness_.kappa > 0.0 && smoothness_.kappa < 1.0))
    throw std::invalid_argument("boundary regularity C^{1+kappa} needs kappa in (0,1)");
  constexpr int n = 8192;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += derivative_(kTwoPi * i / n).norm();
  length_ = sum * kTwoPi / n;
}

double SmoothDomain::arclength(double s0, double s1) const {
  static constexpr std::array<double, 5> nodes = {
      -0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831, 0.9061798459386640};
  static constexpr std::array<double, 5> weights = {0.2369268850561891, 0.4786286704993665,
                                                    0.5688888888888889, 0.4786286704993665,
                                                    0.2369268850561891};
  constexpr int pieces = 8;
  const double step = (s1 - s0) / pieces;
  double sum = 0.0;
  for (int p = 0; p < pieces; ++p) {
    const double mid = s0 + (p + 0.5) * step;
    for (std::size_t q = 0; q < nodes.size(); ++q)
      sum += weights[q] * derivative_(mid + 0.5 * step * nodes[q]).norm();
  }
  return 0.5 * step * sum;
}

DomainCheck SmoothDomain::check(int samples) const {
  DomainCheck out;
  const Point gap0 = curve_(0.0) - curve_(kTwoPi);
  const Point gap1 = derivative_(0.0) - derivative_(kTwoPi);
  out.closure_gap = std::max(gap0.norm(), gap1.norm());
  out.closed = out.closure_gap <= 1e-12 * std::max(1.0, curve_(0.0).norm());

  std::vector<Point> pts(samples);
  out.min_speed = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double s = kTwoPi * i / samples;
    pts[i] = curve_(s);
    out.min_speed = std::min(out.min_speed, derivative_(s).norm());
  }

  out.simple = true;
  for (int i = 0; i < samples && out.simple; ++i) {
    const Point& a = pts[i];
    const Point& b = pts[(i + 1) % samples];
    const double xmin = std::min(a.x(), b.x()), xmax = std::max(a.x(), b.x());
    const double ymin = std::min(a.y(), b.y()), ymax = std::max(a.y(), b.y());
    for (int j = i + 2; j < samples; ++j) {
      if (i == 0 && j == samples - 1) continue;  // adjacent through the seam
      const Point& c = pts[j];
      const Point& d = pts[(j + 1) % samples];
      if (std::max(c.x(), d.x()) < xmin || std::min(c.x(), d.x()) > xmax ||
          std::max(c.y(), d.y()) < ymin || std::min(c.y(), d.y()) > ymax)
        continue;
      if (segments_intersect(a, b, c, d)) {
        out.simple = false;
        break;
      }
    }
  }
  return out;
}

double SmoothDomain::diameter(int samples) const {
  std::vector<Point> pts(samples);
  for (int i = 0; i < samples; ++i) pts[i] = curve_(kTwoPi * i / samples);
  double best = 0.0;
  for (int i = 0; i < samples; ++i)
    for (int j = i + 1; j < samples; ++j) best = std::max(best, (pts[i] - pts[j]).norm());
  return best;
}

SmoothDomain make_disk(double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("make_disk: radius must be positive");
  return SmoothDomain(
      "disk",
      [radius](double s) { return Point(radius * std::cos(s), radius * std::sin(s)); },
      [radius](double s) { return Point(-radius * std::sin(s), radius * std::cos(s)); },
      Smoothness{});
}

SmoothDomain make_smooth_star(double base_radius, double amplitude, int lobes) {
  if (!(base_radius > 0.0)) throw std::invalid_argument("make_smooth_star: base radius must be positive");
  if (!(amplitude >= 0.0) || amplitude >= 1.0)
    throw std::invalid_argument("make_smooth_star: amplitude must lie in [0, 1)");
  if (lobes < 0) throw std::invalid_argument("make_smooth_star: lobes must be nonnegative");
  const double k = lobes;
  auto radial = [=](double s) { return base_radius * (1.0 + amplitude * std::cos(k * s)); };
  auto radial_prime = [=](double s) { return -base_radius * amplitude * k * std::sin(k * s); };
  return SmoothDomain(
      "star",
      [radial](double s) { return Point(radial(s) * std::cos(s), radial(s) * std::sin(s)); },
      [radial, radial_prime](double s) {
        const double r = radial(s), dr = radial_prime(s);
        return Point(dr * std::cos(s) - r * std::sin(s), dr * std::sin(s) + r * std::cos(s));
      },
      Smoothness{});
}

double Mesh::triangle_area(std::size_t t) const {
  const auto& tri = triangles[t];
  return 0.5 * cross(vertices[tri[1]] - vertices[tri[0]], vertices[tri[2]] - vertices[tri[0]]);
}

double Mesh::total_area() const {
  double sum = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) sum += triangle_area(t);
  return sum;
}

std::vector<Point> Mesh::boundary_points() const {
  std::vector<Point> out;
  out.reserve(boundary_ring.size());
  for (int v : boundary_ring) out.push_back(vertices[v]);
  return out;
}

MeshCheck check_mesh(const Mesh& mesh, const SmoothDomain& domain) {
  MeshCheck out;
  std::ostringstream msg;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    if (!(mesh.triangle_area(t) > 0.0)) {
      out.positively_oriented = false;
      msg << "triangle " << t << " has nonpositive area; ";
      break;
    }
  }

  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& tri : mesh.triangles)
    for (int e = 0; e < 3; ++e) {
      const int a = tri[e], b = tri[(e + 1) % 3];
      ++edge_count[{std::min(a, b), std::max(a, b)}];
    }
  std::map<std::pair<int, int>, int> ring_edges;
  const std::size_t m = mesh.boundary_ring.size();
  for (std::size_t i = 0; i < m; ++i) {
    const int a = mesh.boundary_ring[i], b = mesh.boundary_ring[(i + 1) % m];
    ring_edges[{std::min(a, b), std::max(a, b)}] = 1;
  }
  for (const auto& [edge, count] : edge_count) {
    const bool on_ring = ring_edges.count(edge) > 0;
    if (count > 2 || (count == 1 && !on_ring) || (count == 2 && on_ring)) {
      out.conforming = false;
      msg << "edge (" << edge.first << "," << edge.second << ") used " << count << " times; ";
      break;
    }
  }
  if (ring_edges.size() != m) out.conforming = false;

  for (std::size_t i = 0; i < m; ++i) {
    const double dist = (mesh.vertices[mesh.boundary_ring[i]] - domain.point(mesh.boundary_params[i])).norm();
    out.max_curve_distance = std::max(out.max_curve_distance, dist);
  }
  out.boundary_on_curve = out.max_curve_distance <= 1e-10;

  double sum = 0.0;
  for (double w : mesh.boundary_weights) {
    if (!(w > 0.0)) out.weights_consistent = false;
    sum += w;
  }
  out.weight_sum_error = std::abs(sum - domain.length());
  if (out.weight_sum_error > 1e-8) out.weights_consistent = false;

  // consecutive ring vertices advance along the curve direction
  for (std::size_t i = 0; i < m; ++i) {
    const Point& a = mesh.vertices[mesh.boundary_ring[i]];
    const Point& b = mesh.vertices[mesh.boundary_ring[(i + 1) % m]];
    if ((b - a).dot(domain.derivative(mesh.boundary_params[i])) <= 0.0) {
      out.ring_orientation = false;
      msg << "boundary ring runs against the curve at index " << i << "; ";
      break;
    }
  }
  out.message = msg.str();
  return out;
}

Mesh triangulate(const SmoothDomain& domain, double target_h, double boundary_h) {
  if (boundary_h <= 0.0 || boundary_h > target_h) boundary_h = target_h;
  if (!(target_h > 0.0)) throw std::invalid_argument("triangulate: target_h must be positive");
  const double diam = domain.diameter();
  if (!(target_h < diam)) throw std::invalid_argument("triangulate: target_h exceeds domain diameter");

  constexpr int probe = 4096;
  double max_radius = 0.0, max_speed = 0.0;
  for (int i = 0; i < probe; ++i) {
    const double s = kTwoPi * i / probe;
    const Point c = domain.point(s), dc = domain.derivative(s);
    if (cross(c, dc) <= 0.0)
      throw MeshingError("triangulate: curve is not star-shaped about the origin", c);
    max_radius = std::max(max_radius, c.norm());
    max_speed = std::max(max_speed, dc.norm());
  }

  // Radii of the vertex rings as fractions rho of the boundary curve. Ring
  // spacing sqrt(3)/2 * h gives near-equilateral triangles on the disk; next to
  // the boundary the spacing starts at boundary_h and grows geometrically.
  constexpr double kRowFactor = 0.8660254037844386;
  constexpr double kGrowth = 1.15;
  const double interior_step = kRowFactor * target_h;
  std::vector<double> depths;  // physical depth of each graded ring below the boundary
  double depth = 0.0;
  for (double step = kRowFactor * boundary_h; step < interior_step && depth + step < 0.5 * max_radius;
       step *= kGrowth) {
    depth += step;
    depths.push_back(depth);
  }
  const double remaining = max_radius - depth;
  const int uniform_rings = std::max(2, static_cast<int>(std::ceil(remaining / interior_step)));
  std::vector<double> rho;  // ascending, last entry 1
  for (int k = 1; k <= uniform_rings; ++k) rho.push_back(remaining * k / uniform_rings / max_radius);
  if (!depths.empty()) {
    // the deepest graded ring coincides with the outermost uniform ring
    for (auto it = std::next(depths.rbegin()); it != depths.rend(); ++it) rho.push_back(1.0 - *it / max_radius);
    rho.push_back(1.0);
  }
  const int rings = static_cast<int>(rho.size());
  std::vector<int> ring_count(rings + 1, 1);
  for (int k = 1; k <= rings; ++k) {
    const double gap_in = rho[k - 1] - (k >= 2 ? rho[k - 2] : 0.0);
    const double gap_out = k < rings ? rho[k] - rho[k - 1] : gap_in;
    const double local_h = std::min(target_h, std::min(gap_in, gap_out) * max_radius / kRowFactor);
    ring_count[k] = std::max(6, static_cast<int>(std::ceil(kTwoPi * rho[k - 1] * max_speed / local_h)));
  }
  ring_count[rings] = std::max(ring_count[rings], 16);

  Mesh mesh;
  std::vector<int> ring_start(rings + 1, 0);
  mesh.vertices.emplace_back(0.0, 0.0);
  for (int k = 1; k <= rings; ++k) {
    ring_start[k] = static_cast<int>(mesh.vertices.size());
    for (int j = 0; j < ring_count[k]; ++j) {
      const double s = kTwoPi * j / ring_count[k];
      mesh.vertices.push_back(k == rings ? domain.point(s) : Point(rho[k - 1] * domain.point(s)));
    }
  }

  for (int j = 0; j < ring_count[1]; ++j)
    mesh.triangles.push_back({0, ring_start[1] + j, ring_start[1] + (j + 1) % ring_count[1]});

  for (int k = 2; k <= rings; ++k) {
    const long na = ring_count[k - 1], nb = ring_count[k];
    const int a0 = ring_start[k - 1], b0 = ring_start[k];
    long i = 0, j = 0;
    while (i < na || j < nb) {
      // advance the ring whose next vertex has the smaller angle: (i+1)/na vs (j+1)/nb
      const bool advance_inner = j == nb || (i < na && (i + 1) * nb < (j + 1) * na);
      if (advance_inner) {
        mesh.triangles.push_back({a0 + static_cast<int>(i % na), b0 + static_cast<int>(j % nb),
                                  a0 + static_cast<int>((i + 1) % na)});
        ++i;
      } else {
        mesh.triangles.push_back({a0 + static_cast<int>(i % na), b0 + static_cast<int>(j % nb),
                                  b0 + static_cast<int>((j + 1) % nb)});
        ++j;
      }
    }
  }

  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const double area = mesh.triangle_area(t);
    if (!(area > 1e-14 * target_h * target_h)) {
      const auto& tri = mesh.triangles[t];
      const Point centroid = (mesh.vertices[tri[0]] + mesh.vertices[tri[1]] + mesh.vertices[tri[2]]) / 3.0;
      throw MeshingError("triangulate: degenerate triangle", centroid);
    }
  }

  const int nb = ring_count[rings];
  mesh.boundary_ring.resize(nb);
  mesh.boundary_params.resize(nb);
  for (int j = 0; j < nb; ++j) {
    mesh.boundary_ring[j] = ring_start[rings] + j;
    mesh.boundary_params[j] = kTwoPi * j / nb;
  }
  mesh.segment_lengths.resize(nb);
  for (int j = 0; j < nb; ++j)
    mesh.segment_lengths[j] = domain.arclength(kTwoPi * j / nb, kTwoPi * (j + 1) / nb);
  mesh.boundary_weights.resize(nb);
  for (int j = 0; j < nb; ++j)
    mesh.boundary_weights[j] = 0.5 * (mesh.segment_lengths[(j + nb - 1) % nb] + mesh.segment_lengths[j]);

  double h = 0.0;
  for (const auto& tri : mesh.triangles)
    for (int e = 0; e < 3; ++e)
      h = std::max(h, (mesh.vertices[tri[e]] - mesh.vertices[tri[(e + 1) % 3]]).norm());
  mesh.h = h;
  return mesh;
}

}  // namespace steklov
