#include "hdgpath/cases.hpp"

#include <cmath>
#include <complex>
#include <memory>
#include <stdexcept>
#include <utility>

namespace hdgpath {

namespace {

using Cx = std::complex<double>;

double sinsin(const Vec2& x) { return std::sin(x.x()) * std::sin(x.y()); }

Vec2 sinsin_q(const Vec2& x) {
  return {-std::cos(x.x()) * std::sin(x.y()),
          -std::sin(x.x()) * std::cos(x.y())};
}

// f = -div q = laplace u for K = I.
double sinsin_f(const Vec2& x) { return -2.0 * sinsin(x); }

ProblemData smooth_data(std::shared_ptr<const Curve> neumann_curve) {
  ProblemData d;
  d.source = [](const Vec2& x, int) { return sinsin_f(x); };
  d.dirichlet = [](const Vec2& x) { return sinsin(x); };
  d.neumann = [nc = std::move(neumann_curve)](const Vec2& x) {
    return sinsin_q(x).dot(nc->unit_normal(x));
  };
  d.jump_scalar = [](const Vec2&) { return 0.0; };
  d.jump_flux = [](const Vec2&) { return 0.0; };
  return d;
}

void attach_smooth_solution(ManufacturedCase& c) {
  c.exact_u = [](const Vec2& x, int) { return sinsin(x); };
  c.exact_q = [](const Vec2& x, int) { return sinsin_q(x); };
}

// Immersed background grid by default, structured polar mesh on request.
std::function<Mesh(int, FitMode)> ring_mesher(const DomainSpec& spec,
                                              const Vec2& center, double r_in,
                                              double r_out) {
  return [spec, center, r_in, r_out](int param, FitMode fit) {
    if (fit == FitMode::immersed) return generate_immersed(spec, param);
    return generate_annulus(center, r_in, r_out, param);
  };
}

ManufacturedCase case_ex1() {
  ManufacturedCase c;
  c.label = "ex1";
  auto box = std::make_shared<PolygonCurve>(
      make_rectangle(Vec2(0, 0), Vec2(1, 1)));
  c.spec.boundary = {box};
  c.spec.boundary_part = [](int, const Vec2& x) {
    return x.x() < 1e-9 ? BoundaryPart::neumann : BoundaryPart::dirichlet;
  };
  c.spec.bbox_lo = Vec2(0, 0);
  c.spec.bbox_hi = Vec2(1, 1);
  attach_smooth_solution(c);
  c.data = smooth_data(box);
  c.levels = {4, 8, 16, 32};
  // Immersed family: interior grid of n-1 cells of size 1/n offset half a
  // cell from every wall, i.e. the background grid shifted so the gap to
  // the boundary is h/2 instead of a full aligned cell.
  c.mesher = [](int n, FitMode fit) {
    if (fit == FitMode::immersed) {
      double g = 0.5 / n;
      return generate_square_grid(Vec2(g, g), Vec2(1 - g, 1 - g), n - 1,
                                  n - 1);
    }
    return generate_square_grid(Vec2(0, 0), Vec2(1, 1), n, n);
  };
  return c;
}

ManufacturedCase ring_case(const std::string& label, const Vec2& center,
                           double r_in, double r_out, const Vec2& bbox_lo,
                           const Vec2& bbox_hi, std::vector<int> levels) {
  ManufacturedCase c;
  c.label = label;
  auto outer = std::make_shared<CircleCurve>(center, r_out);
  auto inner = std::make_shared<CircleCurve>(center, r_in);
  inner->reverse();
  c.spec.boundary = {outer, inner};
  c.spec.boundary_part = [](int curve_id, const Vec2&) {
    return curve_id == 0 ? BoundaryPart::neumann : BoundaryPart::dirichlet;
  };
  c.spec.bbox_lo = bbox_lo;
  c.spec.bbox_hi = bbox_hi;
  attach_smooth_solution(c);
  c.data = smooth_data(outer);
  c.levels = std::move(levels);
  c.mesher = ring_mesher(c.spec, center, r_in, r_out);
  return c;
}

ManufacturedCase case_ex5(const std::string& label, Ex5Frame frame) {
  ManufacturedCase c;
  c.label = label;
  auto airfoil =
      std::make_shared<JoukowskyAirfoil>(0.1605, Vec2(0.01, 0.01));
  airfoil->reverse();
  auto box = std::make_shared<PolygonCurve>(
      make_rectangle(Vec2(-0.5, -0.5), Vec2(0.5, 0.5)));
  c.spec.boundary = {box, airfoil};
  c.spec.boundary_part = [](int curve_id, const Vec2&) {
    return curve_id == 1 ? BoundaryPart::neumann : BoundaryPart::dirichlet;
  };
  c.spec.bbox_lo = Vec2(-0.5, -0.5);
  c.spec.bbox_hi = Vec2(0.5, 0.5);
  c.levels = {32, 64, 128};
  c.mesher = [spec = c.spec, label](int n, FitMode fit) {
    if (fit != FitMode::immersed)
      throw std::invalid_argument(
          label + ": no boundary-fitted mesh family; use the immersed fit");
    return generate_immersed(spec, n);
  };

  if (label == "ex5a") {
    attach_smooth_solution(c);
    c.data = smooth_data(airfoil);
    return c;
  }

  // Potential flow around the airfoil, zero normal flux on it.  The complex
  // potential W(zeta) = (zeta - s) + R^2/(zeta - s) of the generating circle
  // is read either through the inverse Joukowsky map (consistent data) or
  // literally in physical polar coordinates.
  const double R = airfoil->circle_radius();
  if (frame == Ex5Frame::preimage) {
    const Cx s = airfoil->circle_center();
    c.exact_u = [airfoil, R, s](const Vec2& x, int) {
      Cx d = airfoil->inverse_map(Cx(x.x(), x.y())) - s;
      return (d + R * R / d).real();
    };
    c.exact_q = [airfoil, R, s](const Vec2& x, int) {
      Cx zeta = airfoil->inverse_map(Cx(x.x(), x.y()));
      Cx d = zeta - s;
      Cx fp = (1.0 - R * R / (d * d)) / airfoil->map_derivative(zeta);
      return Vec2(-fp.real(), fp.imag());
    };
  } else {
    c.exact_u = [R](const Vec2& x, int) {
      Cx z(x.x(), x.y());
      return (z + R * R / z).real();
    };
    c.exact_q = [R](const Vec2& x, int) {
      Cx z(x.x(), x.y());
      Cx fp = 1.0 - R * R / (z * z);
      return Vec2(-fp.real(), fp.imag());
    };
  }
  c.data.source = [](const Vec2&, int) { return 0.0; };
  c.data.dirichlet = [u = c.exact_u](const Vec2& x) { return u(x, 1); };
  c.data.neumann = [](const Vec2&) { return 0.0; };
  c.data.jump_scalar = [](const Vec2&) { return 0.0; };
  c.data.jump_flux = [](const Vec2&) { return 0.0; };
  return c;
}

// Shared layout of the interface cases: unit-ish square with a closed
// curved interface strictly inside, Dirichlet data from the outer branch.
ManufacturedCase interface_case(const std::string& label,
                                std::shared_ptr<const Curve> interface) {
  ManufacturedCase c;
  c.label = label;
  auto box = std::make_shared<PolygonCurve>(
      make_rectangle(Vec2(-1, -1), Vec2(1, 1)));
  c.spec.boundary = {box};
  c.spec.boundary_part = [](int, const Vec2&) {
    return BoundaryPart::dirichlet;
  };
  c.spec.interface = interface;
  c.spec.bbox_lo = Vec2(-1, -1);
  c.spec.bbox_hi = Vec2(1, 1);
  c.has_interface = true;
  c.fit = FitMode::interpolated;
  c.levels = {12, 24, 48, 96};
  c.mesher = [interface, label](int n, FitMode fit) {
    if (fit != FitMode::interpolated)
      throw std::invalid_argument(
          label + ": interface runs need the interpolated fit");
    return generate_snapped(Vec2(-1, -1), Vec2(1, 1), n, *interface,
                            SnapMode::keep_both);
  };
  return c;
}

// exp/cos inside, sin(pi x) sin(pi y) outside, identity diffusion.
void attach_two_branch_solution(ManufacturedCase& c) {
  auto u1 = [](const Vec2& x) { return std::exp(x.x()) * std::cos(x.y()); };
  auto q1 = [](const Vec2& x) {
    return Vec2(-std::exp(x.x()) * std::cos(x.y()),
                std::exp(x.x()) * std::sin(x.y()));
  };
  auto u2 = [](const Vec2& x) {
    return std::sin(M_PI * x.x()) * std::sin(M_PI * x.y());
  };
  auto q2 = [](const Vec2& x) {
    return Vec2(-M_PI * std::cos(M_PI * x.x()) * std::sin(M_PI * x.y()),
                -M_PI * std::sin(M_PI * x.x()) * std::cos(M_PI * x.y()));
  };
  c.exact_u = [u1, u2](const Vec2& x, int region) {
    return region == 1 ? u1(x) : u2(x);
  };
  c.exact_q = [q1, q2](const Vec2& x, int region) {
    return region == 1 ? q1(x) : q2(x);
  };
  c.data.source = [](const Vec2& x, int region) {
    if (region == 1) return 0.0;  // exp(x) cos(y) is harmonic
    return -2.0 * M_PI * M_PI * std::sin(M_PI * x.x()) *
           std::sin(M_PI * x.y());
  };
  c.data.dirichlet = [u2](const Vec2& x) { return u2(x); };
  c.data.neumann = [](const Vec2&) { return 0.0; };
  c.data.jump_scalar = [u1, u2](const Vec2& x) { return u1(x) - u2(x); };
  c.data.jump_flux = [q1, q2, curve = c.spec.interface](const Vec2& x) {
    return (q1(x) - q2(x)).dot(curve->unit_normal(x));
  };
}

ManufacturedCase case_ex8() {
  auto circle = std::make_shared<CircleCurve>(Vec2(0, 0), 0.5);
  ManufacturedCase c = interface_case("ex8", circle);
  const double kappa2 = 100.0;
  c.spec.diffusion1 = Mat2::Identity();
  c.spec.diffusion2 = kappa2 * Mat2::Identity();
  // u_j = r^5/kappa_j, shifted in region 2 so both jumps vanish on r = 1/2;
  // the flux -kappa_j grad u_j = -5 r^3 (x, y) is continuous by design.
  const double shift = (1.0 - 1.0 / kappa2) * std::pow(0.5, 5);
  c.exact_u = [kappa2, shift](const Vec2& x, int region) {
    double r5 = std::pow(x.squaredNorm(), 2.5);
    return region == 1 ? r5 : r5 / kappa2 + shift;
  };
  c.exact_q = [](const Vec2& x, int) {
    return Vec2(-5.0 * std::pow(x.squaredNorm(), 1.5) * x);
  };
  c.data.source = [](const Vec2& x, int) {
    return 25.0 * std::pow(x.squaredNorm(), 1.5);
  };
  c.data.dirichlet = [u = c.exact_u](const Vec2& x) { return u(x, 2); };
  c.data.neumann = [](const Vec2&) { return 0.0; };
  c.data.jump_scalar = [](const Vec2&) { return 0.0; };
  c.data.jump_flux = [](const Vec2&) { return 0.0; };
  return c;
}

}  // namespace

ManufacturedCase make_case(const std::string& label, Ex5Frame frame) {
  if (label == "ex1") return case_ex1();
  if (label == "ex2")
    return ring_case("ex2", Vec2(0, 0), 14.0, 20.0, Vec2(-20, -20),
                     Vec2(20, 20), {32, 64, 128});
  if (label == "ex3") {
    ManufacturedCase c =
        ring_case("ex3", Vec2(0.5, 0.5), 0.25, 1.0, Vec2(-0.5, -0.5),
                  Vec2(1.5, 1.5), {9, 18, 36, 72, 144});
    c.strategy = PathStrategy::p1;
    return c;
  }
  if (label == "ex4") {
    ManufacturedCase c =
        ring_case("ex4", Vec2(0.5, 0.5), 1.0, 2.0, Vec2(-1.5, -1.5),
                  Vec2(2.5, 2.5), {24, 48, 96, 192});
    c.fit = FitMode::interpolated;
    return c;
  }
  if (label == "ex5a" || label == "ex5b") return case_ex5(label, frame);
  if (label == "ex6") {
    ManufacturedCase c = interface_case(
        "ex6", std::make_shared<EllipseCurve>(Vec2(0, 0), 0.8, 0.4));
    attach_two_branch_solution(c);
    return c;
  }
  if (label == "ex7") {
    ManufacturedCase c =
        interface_case("ex7", std::make_shared<KidneyCurve>());
    attach_two_branch_solution(c);
    return c;
  }
  if (label == "ex8") return case_ex8();
  throw std::invalid_argument("unknown case label: " + label);
}

const std::vector<std::string>& case_labels() {
  static const std::vector<std::string> labels = {
      "ex1", "ex2", "ex3", "ex4", "ex5a", "ex5b", "ex6", "ex7", "ex8"};
  return labels;
}

}  // namespace hdgpath
