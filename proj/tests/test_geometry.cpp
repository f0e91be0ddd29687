#include "hdgpath/geometry.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace hdgpath;

namespace {

// Dense parametric sampling plus golden-section refinement: an independent
// oracle for the closest-point distance.
ClosestPointResult oracle_closest(const Curve& c, const Vec2& x, int n) {
  double best_d2 = std::numeric_limits<double>::max();
  int best_i = 0;
  for (int i = 0; i < n; ++i) {
    double d2 = (c.point_at(static_cast<double>(i) / n) - x).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best_i = i;
    }
  }
  double lo = static_cast<double>(best_i - 1) / n;
  double hi = static_cast<double>(best_i + 1) / n;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - gr * (hi - lo), b = lo + gr * (hi - lo);
  auto d2 = [&](double t) { return (c.point_at(t) - x).squaredNorm(); };
  double fa = d2(a), fb = d2(b);
  for (int it = 0; it < 200; ++it) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - gr * (hi - lo);
      fa = d2(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + gr * (hi - lo);
      fb = d2(b);
    }
  }
  double t = 0.5 * (lo + hi);
  ClosestPointResult r;
  r.point = c.point_at(t);
  r.distance = (r.point - x).norm();
  r.param = t;
  return r;
}

// Independent bisection oracle for ray hits on the implicit value.
std::optional<double> oracle_ray(const Curve& c, const Vec2& x, const Vec2& m,
                                 double t_max) {
  const int steps = 20000;
  double prev = c.implicit_value(x);
  if (std::abs(prev) < 1e-14 * c.scale()) return 0.0;
  for (int i = 1; i <= steps; ++i) {
    double t = t_max * i / steps;
    double cur = c.implicit_value(x + t * m);
    if (prev * cur <= 0.0) {
      double lo = t_max * (i - 1) / steps, hi = t, flo = prev;
      while (hi - lo > 1e-14) {
        double mid = 0.5 * (lo + hi);
        double fm = c.implicit_value(x + mid * m);
        if (flo * fm <= 0.0)
          hi = mid;
        else {
          lo = mid;
          flo = fm;
        }
      }
      return 0.5 * (lo + hi);
    }
    prev = cur;
  }
  return std::nullopt;
}

Vec2 fd_gradient(const Curve& c, const Vec2& x, double h) {
  return Vec2((c.implicit_value(x + Vec2(h, 0)) - c.implicit_value(x - Vec2(h, 0))) / (2 * h),
              (c.implicit_value(x + Vec2(0, h)) - c.implicit_value(x - Vec2(0, h))) / (2 * h));
}

}  // namespace

TEST(Circle, ClosedFormsAndOrientation) {
  CircleCurve c(Vec2(0.5, 0.5), 2.0);
  EXPECT_NEAR(c.implicit_value(Vec2(0.5, 0.5)), -2.0, 1e-15);
  EXPECT_NEAR(c.implicit_value(Vec2(3.5, 0.5)), 1.0, 1e-15);
  Vec2 on = c.point_at(0.3);
  EXPECT_NEAR(c.implicit_value(on), 0.0, 1e-14);
  Vec2 nrm = c.unit_normal(on);
  EXPECT_NEAR((nrm - (on - c.center()).normalized()).norm(), 0.0, 1e-13);

  CircleCurve rev(Vec2(0.5, 0.5), 2.0);
  rev.reverse();
  EXPECT_NEAR(rev.implicit_value(Vec2(0.5, 0.5)), 2.0, 1e-15);
  EXPECT_NEAR((rev.unit_normal(on) + nrm).norm(), 0.0, 1e-13);
}

TEST(Circle, RayHitQuadratic) {
  CircleCurve c(Vec2(0, 0), 1.0);
  auto t = c.ray_hit(Vec2(2.0, 0.0), Vec2(-1.0, 0.0), 10.0);
  ASSERT_TRUE(t);
  EXPECT_NEAR(*t, 1.0, 1e-13);
  EXPECT_FALSE(c.ray_hit(Vec2(2.0, 0.0), Vec2(1.0, 0.0), 10.0));
  EXPECT_FALSE(c.ray_hit(Vec2(2.0, 0.0), Vec2(-1.0, 0.0), 0.5));

  // Two-sided probe: point inside, outward ray misses within range but the
  // backward direction hits; line_hit reports the signed parameter.
  auto s = c.line_hit(Vec2(0.95, 0.0), Vec2(-1.0, 0.0), 0.2);
  ASSERT_TRUE(s);
  EXPECT_NEAR(*s, -0.05, 1e-12);
}

TEST(Ellipse, NormalsMatchFiniteDifferences) {
  EllipseCurve e(Vec2(0, 0), 0.8, 0.4);
  for (double t : {0.0, 0.13, 0.31, 0.5, 0.77, 0.94}) {
    Vec2 x = e.point_at(t);
    EXPECT_NEAR(e.implicit_value(x), 0.0, 1e-13);
    Vec2 fd = fd_gradient(e, x, 1e-6).normalized();
    EXPECT_NEAR((e.unit_normal(x) - fd).norm(), 0.0, 1e-8) << "t=" << t;
  }
}

TEST(Ellipse, ClosestPointMatchesDenseOracle) {
  EllipseCurve e(Vec2(0.1, -0.2), 0.8, 0.4);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ux(-1.2, 1.4), uy(-1.0, 0.8);
  for (int i = 0; i < 200; ++i) {
    Vec2 x(ux(rng), uy(rng));
    ClosestPointResult mine = e.closest_point(x);
    ClosestPointResult ora = oracle_closest(e, x, 100000);
    EXPECT_NEAR(mine.distance, ora.distance, 1e-9 * e.scale());
    EXPECT_NEAR(e.implicit_value(mine.point), 0.0, 1e-10);
  }
}

TEST(Kidney, FrozenValuesAndInsidePoint) {
  KidneyCurve k;
  // ((2*rho2-X)^2 - rho2 + 0.1) at (0.2, 0): X=0.7, rho2=0.49.
  EXPECT_NEAR(k.implicit_value(Vec2(0.2, 0.0)), -0.3116, 1e-10);
  EXPECT_NEAR(k.implicit_value(Vec2(0.0, 0.0)), -0.15, 1e-12);
  EXPECT_GT(k.implicit_value(Vec2(1.5, 0.0)), 0.0);
  EXPECT_GT(k.implicit_value(Vec2(-0.5, 0.0)), 0.0);  // hole of the kidney
}

TEST(Kidney, TracedParameterizationLiesOnCurve) {
  KidneyCurve k;
  for (int i = 0; i < 1000; ++i) {
    Vec2 p = k.point_at(i / 1000.0);
    EXPECT_NEAR(k.implicit_value(p), 0.0, 1e-10);
  }
  EXPECT_LT((k.point_at(0.0) - k.point_at(0.9999)).norm(), 0.05);
}

TEST(Kidney, ClosestPointAndNormals) {
  KidneyCurve k;
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> ux(-0.6, 1.2), uy(-0.9, 0.9);
  int tested = 0;
  for (int i = 0; i < 400 && tested < 120; ++i) {
    Vec2 x(ux(rng), uy(rng));
    if (std::abs(k.implicit_value(x)) < 1e-3) continue;  // skip near-curve seeds
    ++tested;
    ClosestPointResult mine = k.closest_point(x);
    ClosestPointResult ora = oracle_closest(k, x, 100000);
    EXPECT_NEAR(mine.distance, ora.distance, 2e-8 * k.scale()) << x.transpose();
    EXPECT_NEAR(k.implicit_value(mine.point), 0.0, 1e-9);
  }
  for (double t : {0.05, 0.22, 0.47, 0.63, 0.88}) {
    Vec2 x = k.point_at(t);
    Vec2 fd = fd_gradient(k, x, 1e-7).normalized();
    EXPECT_NEAR((k.unit_normal(x) - fd).norm(), 0.0, 1e-7);
  }
}

TEST(Kidney, RayHitMatchesBisectionOracle) {
  KidneyCurve k;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ut(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    Vec2 x = k.point_at(ut(rng));
    double ang = 2 * M_PI * ut(rng);
    Vec2 m(std::cos(ang), std::sin(ang));
    Vec2 start = x - 0.07 * m;
    auto mine = k.ray_hit(start, m, 0.3);
    auto ora = oracle_ray(k, start, m, 0.3);
    ASSERT_EQ(static_cast<bool>(mine), static_cast<bool>(ora));
    if (mine) EXPECT_NEAR(*mine, *ora, 1e-10);
  }
}

TEST(Polygon, SignedDistanceAndRays) {
  PolygonCurve sq = make_rectangle(Vec2(0, 0), Vec2(1, 1));
  EXPECT_NEAR(sq.implicit_value(Vec2(0.5, 0.5)), -0.5, 1e-14);
  EXPECT_NEAR(sq.implicit_value(Vec2(0.5, 0.2)), -0.2, 1e-14);
  EXPECT_NEAR(sq.implicit_value(Vec2(1.5, 0.5)), 0.5, 1e-14);
  EXPECT_NEAR(sq.implicit_value(Vec2(-0.3, -0.4)), 0.5, 1e-14);

  auto t = sq.ray_hit(Vec2(0.5, 0.5), Vec2(0, -1), 2.0);
  ASSERT_TRUE(t);
  EXPECT_NEAR(*t, 0.5, 1e-13);
  ClosestPointResult cp = sq.closest_point(Vec2(0.9, 0.4));
  EXPECT_NEAR(cp.distance, 0.1, 1e-13);
  EXPECT_NEAR(cp.point.x(), 1.0, 1e-13);
  EXPECT_NEAR(cp.point.y(), 0.4, 1e-13);
  // Outward normal on the left wall.
  Vec2 n = sq.unit_normal(Vec2(0.0, 0.6));
  EXPECT_NEAR(n.x(), -1.0, 1e-12);
  EXPECT_NEAR(n.y(), 0.0, 1e-12);
}

TEST(Airfoil, MapIdentities) {
  JoukowskyAirfoil a(0.1605, Vec2(0.01, 0.01));
  double l = a.map_parameter();
  EXPECT_NEAR(l, 0.1605 - std::sqrt(2.0) * 0.01, 1e-15);
  std::complex<double> two_l = a.map(l);
  EXPECT_NEAR(two_l.real(), 2 * l, 1e-15);
  EXPECT_NEAR(two_l.imag(), 0.0, 1e-15);

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ur(0.0, 2 * M_PI);
  std::uniform_real_distribution<double> rr(1.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    std::complex<double> w =
        a.circle_center() + rr(rng) * a.circle_radius() * std::polar(1.0, ur(rng));
    std::complex<double> back = a.inverse_map(a.map(w));
    EXPECT_LT(std::abs(back - w), 1e-12);
    // Complex derivative against finite differences.
    std::complex<double> h(1e-7, 0.0);
    std::complex<double> fd = (a.map(w + h) - a.map(w - h)) / (2.0 * h);
    EXPECT_LT(std::abs(fd - a.map_derivative(w)), 1e-6);
  }
}

TEST(Airfoil, ClosestPointMatchesDenseOracle) {
  JoukowskyAirfoil a(0.1605, Vec2(0.01, 0.01));
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ux(-0.5, 0.5), uy(-0.3, 0.3);
  for (int i = 0; i < 60; ++i) {
    Vec2 x(ux(rng), uy(rng));
    ClosestPointResult mine = a.closest_point(x);
    ClosestPointResult ora = oracle_closest(a, x, 200000);
    EXPECT_NEAR(mine.distance, ora.distance, 1e-8 * a.scale());
  }
}

TEST(Airfoil, InsideTestAndOrientation) {
  JoukowskyAirfoil a(0.1605, Vec2(0.01, 0.01));
  // The camber line midpoint is inside the profile, far points are not.
  Vec2 mid = 0.5 * (a.point_at(0.0) + a.point_at(0.5));
  EXPECT_LT(a.implicit_value(mid), 0.0);
  EXPECT_GT(a.implicit_value(Vec2(1.0, 1.0)), 0.0);

  JoukowskyAirfoil rev(0.1605, Vec2(0.01, 0.01));
  rev.reverse();
  EXPECT_GT(rev.implicit_value(mid), 0.0);
  EXPECT_LT(rev.implicit_value(Vec2(1.0, 1.0)), 0.0);
}

TEST(Airfoil, RayHitMatchesParametricPoints) {
  JoukowskyAirfoil a(0.1605, Vec2(0.01, 0.01));
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> ut(0.0, 1.0);
  for (int i = 0; i < 80; ++i) {
    Vec2 x = a.point_at(ut(rng));
    double ang = 2 * M_PI * ut(rng);
    Vec2 m(std::cos(ang), std::sin(ang));
    Vec2 start = x - 0.01 * m;
    auto t = a.ray_hit(start, m, 0.05);
    if (!t) continue;  // grazing directions may leave the curve
    Vec2 hit = start + *t * m;
    EXPECT_NEAR(a.closest_point(hit).distance, 0.0, 1e-9);
  }
  // A vertical probe through the body must hit.
  Vec2 nose = a.point_at(0.5), tail = a.point_at(0.0);
  Vec2 over = 0.5 * (nose + tail) + Vec2(0.0, 0.2);
  auto t = a.ray_hit(over, Vec2(0, -1), 1.0);
  ASSERT_TRUE(t);
  EXPECT_NEAR(a.closest_point(over + *t * Vec2(0, -1)).distance, 0.0, 1e-9);
}

TEST(ClosestPoint, ReturnedPointsLieOnCurves) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  CircleCurve circ(Vec2(0.2, -0.1), 0.7);
  EllipseCurve ell(Vec2(0, 0), 0.8, 0.4);
  KidneyCurve kid;
  const Curve* curves[] = {&circ, &ell, &kid};
  for (const Curve* c : curves) {
    for (int i = 0; i < 1000; ++i) {
      Vec2 x(u(rng), u(rng));
      ClosestPointResult cp = c->closest_point(x);
      EXPECT_NEAR(c->implicit_value(cp.point), 0.0, 1e-9 * c->scale());
      EXPECT_LE(cp.distance, (c->point_at(0.37) - x).norm() + 1e-12);
    }
  }
}

TEST(DomainSpec, AnnulusMembershipAndRegions) {
  DomainSpec spec;
  auto outer = std::make_shared<CircleCurve>(Vec2(0.5, 0.5), 2.0);
  auto inner = std::make_shared<CircleCurve>(Vec2(0.5, 0.5), 1.0);
  inner->reverse();
  spec.boundary = {outer, inner};
  EXPECT_TRUE(spec.inside(Vec2(0.5 + 1.5, 0.5)));
  EXPECT_FALSE(spec.inside(Vec2(0.5 + 0.5, 0.5)));
  EXPECT_FALSE(spec.inside(Vec2(0.5 + 2.5, 0.5)));
  EXPECT_EQ(spec.region_of(Vec2(0.5, 0.5)), 1);  // no interface

  DomainSpec square;
  square.boundary = {std::make_shared<PolygonCurve>(
      make_rectangle(Vec2(-1, -1), Vec2(1, 1)))};
  square.interface = std::make_shared<EllipseCurve>(Vec2(0, 0), 0.8, 0.4);
  EXPECT_EQ(square.region_of(Vec2(0, 0)), 1);
  EXPECT_EQ(square.region_of(Vec2(0.9, 0.9)), 2);
}
