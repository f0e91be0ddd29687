#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "hdgpath/quadrature.hpp"

namespace hdgpath {

struct ClosestPointResult {
  Vec2 point;      // nearest point on the curve
  double distance;
  double param;    // parameter in [0,1) with point_at(param) == point
};

// A closed curve with a signed implicit description.  The sign convention is
// fixed by `oriented()`: implicit_value is negative on the side declared as
// the inside of the domain (or of region 1 for an interface), and
// unit_normal points away from that side.
class Curve {
 public:
  virtual ~Curve() = default;

  double implicit_value(const Vec2& x) const { return side_ * raw_value(x); }
  Vec2 implicit_gradient(const Vec2& x) const {
    return side_ * raw_gradient(x);
  }
  Vec2 unit_normal(const Vec2& x) const;

  virtual ClosestPointResult closest_point(const Vec2& x) const;

  // Smallest t >= 0 with x + t*m on the curve, restricted to t <= t_max.
  virtual std::optional<double> ray_hit(const Vec2& x, const Vec2& m,
                                        double t_max) const;
  // Hit of smallest magnitude along the full line x + t*m, |t| <= t_max.
  std::optional<double> line_hit(const Vec2& x, const Vec2& m,
                                 double t_max) const;

  virtual Vec2 point_at(double t) const = 0;  // t in [0,1), closed
  virtual double scale() const = 0;           // characteristic diameter

  // Flip which side counts as inside.
  void reverse() { side_ = -side_; }
  int side() const { return side_; }

 protected:
  virtual double raw_value(const Vec2& x) const = 0;
  virtual Vec2 raw_gradient(const Vec2& x) const = 0;
  virtual Mat2 raw_hessian(const Vec2& x) const;
  virtual int param_samples() const { return 256; }

  int side_ = 1;
};

class CircleCurve : public Curve {
 public:
  CircleCurve(const Vec2& center, double radius)
      : center_(center), radius_(radius) {}

  ClosestPointResult closest_point(const Vec2& x) const override;
  std::optional<double> ray_hit(const Vec2& x, const Vec2& m,
                                double t_max) const override;
  Vec2 point_at(double t) const override;
  double scale() const override { return 2.0 * radius_; }

  const Vec2& center() const { return center_; }
  double radius() const { return radius_; }

 protected:
  double raw_value(const Vec2& x) const override;
  Vec2 raw_gradient(const Vec2& x) const override;

 private:
  Vec2 center_;
  double radius_;
};

class EllipseCurve : public Curve {
 public:
  EllipseCurve(const Vec2& center, double ax, double ay)
      : center_(center), ax_(ax), ay_(ay) {}

  Vec2 point_at(double t) const override;
  double scale() const override { return 2.0 * std::max(ax_, ay_); }

 protected:
  double raw_value(const Vec2& x) const override;
  Vec2 raw_gradient(const Vec2& x) const override;
  Mat2 raw_hessian(const Vec2& x) const override;

 private:
  Vec2 center_;
  double ax_, ay_;
};

// Quartic level set ((2*rho2 - x - 0.5)^2 - rho2 + 0.1 with
// rho2 = (x+0.5)^2 + y^2): a smooth non-convex "kidney" closed curve.
class KidneyCurve : public Curve {
 public:
  KidneyCurve();

  Vec2 point_at(double t) const override;
  double scale() const override { return 1.6; }

 protected:
  double raw_value(const Vec2& x) const override;
  Vec2 raw_gradient(const Vec2& x) const override;
  Mat2 raw_hessian(const Vec2& x) const override;
  int param_samples() const override { return 512; }

 private:
  std::vector<Vec2> trace_;  // marched polyline used as parameterization
};

// Closed polygonal chain (counter-clockwise = interior negative).
class PolygonCurve : public Curve {
 public:
  explicit PolygonCurve(std::vector<Vec2> vertices);

  ClosestPointResult closest_point(const Vec2& x) const override;
  std::optional<double> ray_hit(const Vec2& x, const Vec2& m,
                                double t_max) const override;
  Vec2 point_at(double t) const override;
  double scale() const override { return scale_; }

  const std::vector<Vec2>& vertices() const { return verts_; }

 protected:
  double raw_value(const Vec2& x) const override;
  Vec2 raw_gradient(const Vec2& x) const override;

 private:
  std::vector<Vec2> verts_;
  std::vector<double> cumlen_;
  double scale_ = 1.0;
};

PolygonCurve make_rectangle(const Vec2& lo, const Vec2& hi);

// Image of the circle |w - s| = r under the Joukowsky map w -> w + l^2/w,
// with l = r - |s|.  Signed distance implicit description, sign from the
// winding number of a fine polygonal approximation.
class JoukowskyAirfoil : public Curve {
 public:
  JoukowskyAirfoil(double circle_radius, const Vec2& circle_center);

  ClosestPointResult closest_point(const Vec2& x) const override;
  std::optional<double> ray_hit(const Vec2& x, const Vec2& m,
                                double t_max) const override;
  Vec2 point_at(double t) const override;
  double scale() const override { return scale_; }

  std::complex<double> map(std::complex<double> w) const;
  std::complex<double> map_derivative(std::complex<double> w) const;
  // Preimage on or outside the generating circle.
  std::complex<double> inverse_map(std::complex<double> z) const;

  double circle_radius() const { return r_; }
  std::complex<double> circle_center() const { return s_; }
  double map_parameter() const { return l_; }

 protected:
  double raw_value(const Vec2& x) const override;
  Vec2 raw_gradient(const Vec2& x) const override;
  int param_samples() const override { return 2048; }

 private:
  bool point_inside(const Vec2& x) const;

  double r_;
  std::complex<double> s_;
  double l_;
  double scale_ = 1.0;
  std::vector<Vec2> poly_;  // fine polyline for the winding test
};

enum class BoundaryPart { dirichlet, neumann };

// Full description of the continuous problem geometry: oriented boundary
// curves, a Dirichlet/Neumann partition rule, an optional interface curve
// (region 1 = its negative side) and per-region diffusion tensors.
struct DomainSpec {
  std::vector<std::shared_ptr<const Curve>> boundary;
  std::function<BoundaryPart(int curve_id, const Vec2&)> boundary_part;
  std::shared_ptr<const Curve> interface;
  Mat2 diffusion1 = Mat2::Identity();
  Mat2 diffusion2 = Mat2::Identity();
  Vec2 bbox_lo{0, 0}, bbox_hi{1, 1};

  DomainSpec();

  // Max over the oriented boundary values: negative strictly inside.
  double implicit_value(const Vec2& x) const;
  bool inside(const Vec2& x) const { return implicit_value(x) < 0.0; }
  int region_of(const Vec2& x) const;
  const Mat2& diffusion(int region) const {
    return region == 1 ? diffusion1 : diffusion2;
  }
  bool has_interface() const { return interface != nullptr; }
};

}  // namespace hdgpath
