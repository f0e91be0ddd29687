#include "hdgpath/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace hdgpath {

namespace {
constexpr double kPi = 3.14159265358979323846;

double cross2(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}
}  // namespace

Vec2 Curve::unit_normal(const Vec2& x) const {
  Vec2 g = implicit_gradient(x);
  double n = g.norm();
  if (n < 1e-30) throw std::runtime_error("unit_normal: vanishing gradient");
  return g / n;
}

Mat2 Curve::raw_hessian(const Vec2& x) const {
  double h = 1e-6 * scale();
  Mat2 H;
  Vec2 gx = (raw_gradient(x + Vec2(h, 0)) - raw_gradient(x - Vec2(h, 0))) / (2 * h);
  Vec2 gy = (raw_gradient(x + Vec2(0, h)) - raw_gradient(x - Vec2(0, h))) / (2 * h);
  H.col(0) = gx;
  H.col(1) = gy;
  H = 0.5 * (H + H.transpose().eval());
  return H;
}

ClosestPointResult Curve::closest_point(const Vec2& x) const {
  // Seed from a coarse parametric sweep, then damped Newton on the
  // stationarity system of min |p-x|^2 subject to F(p)=0.
  int n = param_samples();
  double best_d2 = std::numeric_limits<double>::max();
  double best_t = 0.0;
  Vec2 best_p = point_at(0.0);
  for (int i = 0; i < n; ++i) {
    double t = static_cast<double>(i) / n;
    Vec2 p = point_at(t);
    double d2 = (p - x).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best_t = t;
      best_p = p;
    }
  }

  Vec2 p = best_p;
  Vec2 g = raw_gradient(p);
  double mu = g.squaredNorm() > 0 ? (p - x).dot(g) / g.squaredNorm() : 0.0;
  double tol = 1e-12 * scale();
  auto residual = [&](const Vec2& pp, double mm) {
    Vec2 gg = raw_gradient(pp);
    Eigen::Vector3d r;
    r.head<2>() = pp - x - mm * gg;
    r[2] = raw_value(pp);
    return r;
  };
  Eigen::Vector3d r = residual(p, mu);
  for (int it = 0; it < 100 && r.norm() > tol; ++it) {
    g = raw_gradient(p);
    Mat2 H = raw_hessian(p);
    Eigen::Matrix3d J;
    J.topLeftCorner<2, 2>() = Mat2::Identity() - mu * H;
    J.topRightCorner<2, 1>() = -g;
    J.bottomLeftCorner<1, 2>() = g.transpose();
    J(2, 2) = 0.0;
    Eigen::Vector3d step = J.fullPivLu().solve(-r);
    double alpha = 1.0;
    for (int ls = 0; ls < 40; ++ls) {
      Vec2 pn = p + alpha * step.head<2>();
      double mn = mu + alpha * step[2];
      Eigen::Vector3d rn = residual(pn, mn);
      if (rn.norm() < r.norm() || rn.norm() < tol) {
        p = pn;
        mu = mn;
        r = rn;
        break;
      }
      alpha *= 0.5;
    }
  }

  ClosestPointResult res;
  res.point = p;
  res.distance = (p - x).norm();
  res.param = best_t;
  return res;
}

std::optional<double> Curve::ray_hit(const Vec2& x, const Vec2& m,
                                     double t_max) const {
  auto f = [&](double t) { return raw_value(x + t * m); };
  double f0 = f(0.0);
  Vec2 g0 = raw_gradient(x);
  if (std::abs(f0) <= 1e-13 * scale() * std::max(1.0, g0.norm())) return 0.0;
  const int steps = 512;
  double prev_t = 0.0, prev_f = f0;
  for (int i = 1; i <= steps; ++i) {
    double t = t_max * i / steps;
    double ft = f(t);
    if (prev_f * ft <= 0.0) {
      double lo = prev_t, hi = t, flo = prev_f;
      for (int it = 0; it < 100; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (flo * fm <= 0.0)
          hi = mid;
        else {
          lo = mid;
          flo = fm;
        }
      }
      return 0.5 * (lo + hi);
    }
    prev_t = t;
    prev_f = ft;
  }
  return std::nullopt;
}

std::optional<double> Curve::line_hit(const Vec2& x, const Vec2& m,
                                      double t_max) const {
  std::optional<double> plus = ray_hit(x, m, t_max);
  std::optional<double> minus = ray_hit(x, -m, t_max);
  if (plus && minus) return *plus <= *minus ? *plus : -*minus;
  if (plus) return *plus;
  if (minus) return -*minus;
  return std::nullopt;
}

// ---------------------------------------------------------------- circle

double CircleCurve::raw_value(const Vec2& x) const {
  return (x - center_).norm() - radius_;
}

Vec2 CircleCurve::raw_gradient(const Vec2& x) const {
  Vec2 d = x - center_;
  double n = d.norm();
  if (n < 1e-30) return Vec2(1.0, 0.0);
  return d / n;
}

ClosestPointResult CircleCurve::closest_point(const Vec2& x) const {
  Vec2 d = x - center_;
  double n = d.norm();
  Vec2 dir = n < 1e-30 ? Vec2(1.0, 0.0) : Vec2(d / n);
  ClosestPointResult res;
  res.point = center_ + radius_ * dir;
  res.distance = std::abs(n - radius_);
  double ang = std::atan2(dir.y(), dir.x());
  res.param = ang < 0 ? (ang + 2 * kPi) / (2 * kPi) : ang / (2 * kPi);
  return res;
}

std::optional<double> CircleCurve::ray_hit(const Vec2& x, const Vec2& m,
                                           double t_max) const {
  Vec2 d = x - center_;
  double b = m.dot(d);
  double c = d.squaredNorm() - radius_ * radius_;
  double disc = b * b - c;  // |m| == 1 assumed
  if (disc < 0.0) return std::nullopt;
  double sq = std::sqrt(disc);
  for (double t : {-b - sq, -b + sq}) {
    if (t >= -1e-15 && t <= t_max) return std::max(t, 0.0);
  }
  return std::nullopt;
}

Vec2 CircleCurve::point_at(double t) const {
  double a = 2 * kPi * t;
  return center_ + radius_ * Vec2(std::cos(a), std::sin(a));
}

// --------------------------------------------------------------- ellipse

double EllipseCurve::raw_value(const Vec2& x) const {
  double u = (x.x() - center_.x()) / ax_;
  double v = (x.y() - center_.y()) / ay_;
  return u * u + v * v - 1.0;
}

Vec2 EllipseCurve::raw_gradient(const Vec2& x) const {
  return Vec2(2.0 * (x.x() - center_.x()) / (ax_ * ax_),
              2.0 * (x.y() - center_.y()) / (ay_ * ay_));
}

Mat2 EllipseCurve::raw_hessian(const Vec2&) const {
  Mat2 H = Mat2::Zero();
  H(0, 0) = 2.0 / (ax_ * ax_);
  H(1, 1) = 2.0 / (ay_ * ay_);
  return H;
}

Vec2 EllipseCurve::point_at(double t) const {
  double a = 2 * kPi * t;
  return center_ + Vec2(ax_ * std::cos(a), ay_ * std::sin(a));
}

// ---------------------------------------------------------------- kidney

KidneyCurve::KidneyCurve() {
  // March the zero level set once and keep the polyline as the
  // parameterization used for seeding.
  auto project = [this](Vec2 p) {
    for (int it = 0; it < 25; ++it) {
      double f = raw_value(p);
      Vec2 g = raw_gradient(p);
      p -= f * g / g.squaredNorm();
      if (std::abs(f) < 1e-15) break;
    }
    return p;
  };
  // Start from a point found along a horizontal ray out of the interior.
  Vec2 start(0.1, 0.0);
  double lo = 0.0, hi = 2.0;
  while (raw_value(start + Vec2(hi, 0)) < 0) hi += 1.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (raw_value(start + Vec2(mid, 0)) < 0 ? lo : hi) = mid;
  }
  Vec2 p = project(start + Vec2(0.5 * (lo + hi), 0.0));
  const double step = 0.004 * scale();
  trace_.push_back(p);
  for (int i = 0; i < 100000; ++i) {
    Vec2 g = raw_gradient(p);
    Vec2 tangent = Vec2(-g.y(), g.x()).normalized();
    p = project(p + step * tangent);
    if (i > 10 && (p - trace_.front()).norm() < 0.75 * step) break;
    trace_.push_back(p);
  }
}

double KidneyCurve::raw_value(const Vec2& x) const {
  double X = x.x() + 0.5;
  double rho2 = X * X + x.y() * x.y();
  double u = 2.0 * rho2 - X;
  return u * u - rho2 + 0.1;
}

Vec2 KidneyCurve::raw_gradient(const Vec2& x) const {
  double X = x.x() + 0.5;
  double rho2 = X * X + x.y() * x.y();
  double u = 2.0 * rho2 - X;
  Vec2 du(4.0 * X - 1.0, 4.0 * x.y());
  return 2.0 * u * du - Vec2(2.0 * X, 2.0 * x.y());
}

Mat2 KidneyCurve::raw_hessian(const Vec2& x) const {
  double X = x.x() + 0.5;
  double rho2 = X * X + x.y() * x.y();
  double u = 2.0 * rho2 - X;
  Vec2 du(4.0 * X - 1.0, 4.0 * x.y());
  return 2.0 * du * du.transpose() + (8.0 * u - 2.0) * Mat2::Identity();
}

Vec2 KidneyCurve::point_at(double t) const {
  t -= std::floor(t);
  double pos = t * trace_.size();
  std::size_t i = std::min(static_cast<std::size_t>(pos), trace_.size() - 1);
  double frac = pos - i;
  Vec2 p = (1.0 - frac) * trace_[i] + frac * trace_[(i + 1) % trace_.size()];
  // Put the interpolated point back on the curve.
  for (int it = 0; it < 5; ++it) {
    double f = raw_value(p);
    Vec2 g = raw_gradient(p);
    p -= f * g / g.squaredNorm();
  }
  return p;
}

// --------------------------------------------------------------- polygon

PolygonCurve::PolygonCurve(std::vector<Vec2> vertices)
    : verts_(std::move(vertices)) {
  if (verts_.size() < 3) throw std::invalid_argument("PolygonCurve: need >= 3 vertices");
  cumlen_.resize(verts_.size() + 1);
  cumlen_[0] = 0.0;
  Vec2 lo = verts_[0], hi = verts_[0];
  for (std::size_t i = 0; i < verts_.size(); ++i) {
    Vec2 a = verts_[i], b = verts_[(i + 1) % verts_.size()];
    cumlen_[i + 1] = cumlen_[i] + (b - a).norm();
    lo = lo.cwiseMin(a);
    hi = hi.cwiseMax(a);
  }
  scale_ = (hi - lo).norm();
}

double PolygonCurve::raw_value(const Vec2& x) const {
  ClosestPointResult cp = closest_point(x);
  // Even-odd crossing test for the sign.
  bool inside = false;
  for (std::size_t i = 0; i < verts_.size(); ++i) {
    Vec2 a = verts_[i], b = verts_[(i + 1) % verts_.size()];
    if ((a.y() > x.y()) != (b.y() > x.y())) {
      double t = (x.y() - a.y()) / (b.y() - a.y());
      if (a.x() + t * (b.x() - a.x()) > x.x()) inside = !inside;
    }
  }
  return inside ? -cp.distance : cp.distance;
}

Vec2 PolygonCurve::raw_gradient(const Vec2& x) const {
  ClosestPointResult cp = closest_point(x);
  if (cp.distance > 1e-12 * scale_) {
    Vec2 dir = (x - cp.point) / cp.distance;
    return raw_value(x) < 0 ? Vec2(-dir) : dir;
  }
  // On the curve: outward normal of the segment the point lies on.
  double s = cp.param * cumlen_.back();
  std::size_t i = 0;
  while (i + 1 < cumlen_.size() - 1 && cumlen_[i + 1] <= s) ++i;
  Vec2 a = verts_[i], b = verts_[(i + 1) % verts_.size()];
  Vec2 t = (b - a).normalized();
  return Vec2(t.y(), -t.x());
}

ClosestPointResult PolygonCurve::closest_point(const Vec2& x) const {
  ClosestPointResult best;
  best.distance = std::numeric_limits<double>::max();
  for (std::size_t i = 0; i < verts_.size(); ++i) {
    Vec2 a = verts_[i], b = verts_[(i + 1) % verts_.size()];
    Vec2 ab = b - a;
    double s = std::clamp((x - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    Vec2 p = a + s * ab;
    double d = (x - p).norm();
    if (d < best.distance) {
      best.distance = d;
      best.point = p;
      best.param = (cumlen_[i] + s * ab.norm()) / cumlen_.back();
    }
  }
  return best;
}

std::optional<double> PolygonCurve::ray_hit(const Vec2& x, const Vec2& m,
                                            double t_max) const {
  std::optional<double> best;
  for (std::size_t i = 0; i < verts_.size(); ++i) {
    Vec2 a = verts_[i], b = verts_[(i + 1) % verts_.size()];
    Vec2 ab = b - a;
    double denom = cross2(m, ab);
    if (std::abs(denom) < 1e-14 * ab.norm()) continue;
    // Solve x + t m = a + s ab.
    Vec2 rhs = a - x;
    double t = cross2(rhs, ab) / denom;
    double s = cross2(rhs, m) / denom;
    if (s < -1e-12 || s > 1.0 + 1e-12) continue;
    if (t < -1e-12 || t > t_max) continue;
    t = std::max(t, 0.0);
    if (!best || t < *best) best = t;
  }
  return best;
}

Vec2 PolygonCurve::point_at(double t) const {
  t -= std::floor(t);
  double s = t * cumlen_.back();
  std::size_t i = 0;
  while (i + 1 < cumlen_.size() - 1 && cumlen_[i + 1] <= s) ++i;
  Vec2 a = verts_[i], b = verts_[(i + 1) % verts_.size()];
  double seg = cumlen_[i + 1] - cumlen_[i];
  double frac = seg > 0 ? (s - cumlen_[i]) / seg : 0.0;
  return a + frac * (b - a);
}

PolygonCurve make_rectangle(const Vec2& lo, const Vec2& hi) {
  return PolygonCurve({lo, Vec2(hi.x(), lo.y()), hi, Vec2(lo.x(), hi.y())});
}

// --------------------------------------------------------------- airfoil

JoukowskyAirfoil::JoukowskyAirfoil(double circle_radius,
                                   const Vec2& circle_center)
    : r_(circle_radius),
      s_(circle_center.x(), circle_center.y()),
      l_(circle_radius - circle_center.norm()) {
  const int n = 4096;
  poly_.reserve(n);
  Vec2 lo(1e30, 1e30), hi(-1e30, -1e30);
  for (int i = 0; i < n; ++i) {
    std::complex<double> z = map(s_ + r_ * std::polar(1.0, 2 * kPi * i / n));
    Vec2 p(z.real(), z.imag());
    poly_.push_back(p);
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  scale_ = (hi - lo).norm();
}

std::complex<double> JoukowskyAirfoil::map(std::complex<double> w) const {
  return w + l_ * l_ / w;
}

std::complex<double> JoukowskyAirfoil::map_derivative(
    std::complex<double> w) const {
  return 1.0 - l_ * l_ / (w * w);
}

std::complex<double> JoukowskyAirfoil::inverse_map(
    std::complex<double> z) const {
  std::complex<double> sq = std::sqrt(z * z - 4.0 * l_ * l_);
  std::complex<double> w1 = 0.5 * (z + sq);
  std::complex<double> w2 = 0.5 * (z - sq);
  return std::abs(w1 - s_) >= std::abs(w2 - s_) ? w1 : w2;
}

bool JoukowskyAirfoil::point_inside(const Vec2& x) const {
  bool inside = false;
  for (std::size_t i = 0; i < poly_.size(); ++i) {
    Vec2 a = poly_[i], b = poly_[(i + 1) % poly_.size()];
    if ((a.y() > x.y()) != (b.y() > x.y())) {
      double t = (x.y() - a.y()) / (b.y() - a.y());
      if (a.x() + t * (b.x() - a.x()) > x.x()) inside = !inside;
    }
  }
  return inside;
}

ClosestPointResult JoukowskyAirfoil::closest_point(const Vec2& x) const {
  std::complex<double> zx(x.x(), x.y());
  int n = static_cast<int>(poly_.size());
  double best_d2 = std::numeric_limits<double>::max();
  double best_th = 0.0;
  for (int i = 0; i < n; ++i) {
    double d2 = (poly_[i] - x).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best_th = 2 * kPi * i / n;
    }
  }
  // Newton on the squared distance along the parameterization.
  double th = best_th;
  for (int it = 0; it < 60; ++it) {
    std::complex<double> w = s_ + r_ * std::polar(1.0, th);
    std::complex<double> wp = std::complex<double>(0, 1) * (w - s_);
    std::complex<double> z = map(w);
    std::complex<double> zp = map_derivative(w) * wp;
    std::complex<double> zpp =
        2.0 * l_ * l_ / (w * w * w) * wp * wp - map_derivative(w) * (w - s_);
    double g = 2.0 * ((z - zx) * std::conj(zp)).real();
    double gg = 2.0 * (std::norm(zp) + ((z - zx) * std::conj(zpp)).real());
    if (std::abs(gg) < 1e-30) break;
    double dth = -g / gg;
    dth = std::clamp(dth, -2 * kPi / n, 2 * kPi / n);
    th += dth;
    if (std::abs(dth) < 1e-15) break;
  }
  std::complex<double> z = map(s_ + r_ * std::polar(1.0, th));
  ClosestPointResult res;
  res.point = Vec2(z.real(), z.imag());
  res.distance = (res.point - x).norm();
  th = std::fmod(th, 2 * kPi);
  if (th < 0) th += 2 * kPi;
  res.param = th / (2 * kPi);
  return res;
}

std::optional<double> JoukowskyAirfoil::ray_hit(const Vec2& x, const Vec2& m,
                                                double t_max) const {
  // Solve in the parameterization: cross(z(theta) - x, m) = 0 picks the
  // points of the curve on the ray's supporting line.
  ClosestPointResult near = closest_point(x);
  if (near.distance <= 1e-13 * scale_) return 0.0;
  int n = static_cast<int>(poly_.size());
  auto cr = [&](const Vec2& p) { return cross2(p - x, m); };
  std::optional<double> best;
  double prev = cr(poly_[0]);
  for (int i = 1; i <= n; ++i) {
    double cur = cr(poly_[i % n]);
    if (prev * cur <= 0.0 && (prev != 0.0 || cur != 0.0)) {
      double lo = 2 * kPi * (i - 1) / n, hi = 2 * kPi * i / n;
      double flo = prev;
      for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = cr(point_at(mid / (2 * kPi)));
        if (flo * fm <= 0.0)
          hi = mid;
        else {
          lo = mid;
          flo = fm;
        }
      }
      Vec2 p = point_at(0.5 * (lo + hi) / (2 * kPi));
      double t = (p - x).dot(m);
      if (t >= -1e-15 && t <= t_max) {
        t = std::max(t, 0.0);
        if (!best || t < *best) best = t;
      }
    }
    prev = cur;
  }
  return best;
}

double JoukowskyAirfoil::raw_value(const Vec2& x) const {
  ClosestPointResult cp = closest_point(x);
  return point_inside(x) ? -cp.distance : cp.distance;
}

Vec2 JoukowskyAirfoil::raw_gradient(const Vec2& x) const {
  ClosestPointResult cp = closest_point(x);
  if (cp.distance > 1e-12 * scale_) {
    Vec2 dir = (x - cp.point) / cp.distance;
    return point_inside(x) ? Vec2(-dir) : dir;
  }
  // On the curve: outward normal from the tangent of the parameterization.
  std::complex<double> w = s_ + r_ * std::polar(1.0, 2 * kPi * cp.param);
  std::complex<double> zp =
      map_derivative(w) * std::complex<double>(0, 1) * (w - s_);
  Vec2 t(zp.real(), zp.imag());
  t.normalize();
  return Vec2(t.y(), -t.x());
}

Vec2 JoukowskyAirfoil::point_at(double t) const {
  std::complex<double> z = map(s_ + r_ * std::polar(1.0, 2 * kPi * t));
  return Vec2(z.real(), z.imag());
}

// ------------------------------------------------------------ DomainSpec

DomainSpec::DomainSpec() {
  boundary_part = [](int, const Vec2&) { return BoundaryPart::dirichlet; };
}

double DomainSpec::implicit_value(const Vec2& x) const {
  double v = -std::numeric_limits<double>::max();
  for (const auto& c : boundary) v = std::max(v, c->implicit_value(x));
  return v;
}

int DomainSpec::region_of(const Vec2& x) const {
  if (!interface) return 1;
  return interface->implicit_value(x) <= 0.0 ? 1 : 2;
}

}  // namespace hdgpath
