#include "ncr/cases.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ncr/error.hpp"

namespace ncr {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

Jet var(double v, int k) { return Jet::variable(v, k); }

std::array<Jet, 2> zero_velocity(const Jet&, const Jet&, const Jet&) { return {Jet(0.0), Jet(0.0)}; }

std::array<Jet, 2> sinusoidal_velocity(const Jet& x, const Jet& y, const Jet&) {
  return {(cos(kTwoPi * x) - 1.0) * sin(kTwoPi * y), -((cos(kTwoPi * y) - 1.0) * sin(kTwoPi * x))};
}

Jet sin_pressure(const Jet& x, const Jet& y, const Jet&) { return sin(kTwoPi * x) * sin(kTwoPi * y); }

// -lap of the sinusoidal velocity
Vec2 sinusoidal_viscous(const Vec2& p) {
  const double a2 = 4.0 * kPi * kPi;
  return {a2 * std::sin(kTwoPi * p.y) * (2.0 * std::cos(kTwoPi * p.x) - 1.0),
          -a2 * std::sin(kTwoPi * p.x) * (2.0 * std::cos(kTwoPi * p.y) - 1.0)};
}

Vec2 sin_pressure_gradient(const Vec2& p) {
  return {kTwoPi * std::cos(kTwoPi * p.x) * std::sin(kTwoPi * p.y),
          kTwoPi * std::sin(kTwoPi * p.x) * std::cos(kTwoPi * p.y)};
}

std::array<Jet, 2> green_taylor_velocity(const Jet& x, const Jet& y, const Jet& t) {
  const Jet e = exp(-8.0 * kPi * kPi * t);
  const Jet ax = kTwoPi * (x + 0.5), ay = kTwoPi * (y + 0.5);
  return {-(cos(ax) * sin(ay) * e), sin(ax) * cos(ay) * e};
}

Jet green_taylor_pressure(const Jet& x, const Jet& y, const Jet& t) {
  const Jet e = exp(-16.0 * kPi * kPi * t);
  return -0.25 * ((cos(2.0 * kTwoPi * (x + 0.5)) + cos(2.0 * kTwoPi * (y + 0.5))) * e);
}

std::vector<ManufacturedCase> make_cases() {
  std::vector<ManufacturedCase> cases;

  cases.push_back({"noflow-sin", "u = 0, p = sin(2 pi x) sin(2 pi y)", true, false, zero_velocity, sin_pressure,
                   [](const Vec2& p, double, double) { return sin_pressure_gradient(p); }});

  cases.push_back({"sin-sin",
                   "u = ((cos 2 pi x - 1) sin 2 pi y, -(cos 2 pi y - 1) sin 2 pi x), p = sin(2 pi x) sin(2 pi y)",
                   false, false, sinusoidal_velocity, sin_pressure,
                   [](const Vec2& p, double nu, double) { return nu * sinusoidal_viscous(p) + sin_pressure_gradient(p); }});

  cases.push_back({"affine-p", "u = 0, p = x + y - 1", true, false, zero_velocity,
                   [](const Jet& x, const Jet& y, const Jet&) { return x + y - 1.0; },
                   [](const Vec2&, double, double) { return Vec2{1.0, 1.0}; }});

  cases.push_back({"sin-affine-p", "sinusoidal u as in sin-sin, p = x + y - 1", false, false, sinusoidal_velocity,
                   [](const Jet& x, const Jet& y, const Jet&) { return x + y - 1.0; },
                   [](const Vec2& p, double nu, double) { return nu * sinusoidal_viscous(p) + Vec2{1.0, 1.0}; }});

  cases.push_back({"quintic-p", "u = 0, p = x^5 + x^4 y^3 + x^2 y + y^4 - 7/12", true, false, zero_velocity,
                   [](const Jet& x, const Jet& y, const Jet&) {
                     const Jet x2 = x * x, y2 = y * y;
                     return x2 * x2 * x + x2 * x2 * y2 * y + x2 * y + y2 * y2 - 7.0 / 12.0;
                   },
                   [](const Vec2& p, double, double) {
                     const double x = p.x, y = p.y;
                     return Vec2{5 * x * x * x * x + 4 * x * x * x * y * y * y + 2 * x * y,
                                 3 * x * x * x * x * y * y + x * x + 4 * y * y * y};
                   }});

  cases.push_back({"quadratic-p", "u = 0, p = x^2 + x y - y^2 - 1/4", true, false, zero_velocity,
                   [](const Jet& x, const Jet& y, const Jet&) { return x * x + x * y - y * y - 0.25; },
                   [](const Vec2& p, double, double) { return Vec2{2 * p.x + p.y, p.x - 2 * p.y}; }});

  cases.push_back({"green-taylor",
                   "decaying vortex u = (-cos a(x+1/2) sin a(y+1/2), sin a(x+1/2) cos a(y+1/2)) e^{-8 pi^2 t}, "
                   "p = -(cos 2a(x+1/2) + cos 2a(y+1/2)) e^{-16 pi^2 t} / 4, a = 2 pi",
                   false, true, green_taylor_velocity, green_taylor_pressure,
                   [](const Vec2& p, double nu, double t) {
                     // vanishes for nu = 1
                     const double e = std::exp(-8.0 * kPi * kPi * t);
                     const double ax = kTwoPi * (p.x + 0.5), ay = kTwoPi * (p.y + 0.5);
                     const double s = 8.0 * kPi * kPi * (nu - 1.0) * e;
                     return Vec2{-s * std::cos(ax) * std::sin(ay), s * std::sin(ax) * std::cos(ay)};
                   }});
  return cases;
}

}  // namespace

Vec2 ManufacturedCase::velocity_at(const Vec2& x, double t) const {
  const auto u = velocity_jet(Jet(x.x), Jet(x.y), Jet(t));
  return {u[0].v, u[1].v};
}

double ManufacturedCase::pressure_at(const Vec2& x, double t) const {
  return pressure_jet(Jet(x.x), Jet(x.y), Jet(t)).v;
}

Vec2 ManufacturedCase::pressure_gradient_at(const Vec2& x, double t) const {
  const Jet p = pressure_jet(var(x.x, 0), var(x.y, 1), Jet(t));
  return {p.d[0], p.d[1]};
}

VectorFn ManufacturedCase::u(double t) const {
  return [this, t](const Vec2& x) { return velocity_at(x, t); };
}
ScalarFn ManufacturedCase::p(double t) const {
  return [this, t](const Vec2& x) { return pressure_at(x, t); };
}
VectorFn ManufacturedCase::grad_p(double t) const {
  return [this, t](const Vec2& x) { return pressure_gradient_at(x, t); };
}
VectorFn ManufacturedCase::f(double nu, double t) const {
  return [this, nu, t](const Vec2& x) { return forcing(x, nu, t); };
}

double forcing_residual(const ManufacturedCase& c, double nu, double t) {
  double worst = 0.0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const Vec2 x{0.1 + 0.2 * i, 0.1 + 0.2 * j};
      const Jet jx = var(x.x, 0), jy = var(x.y, 1), jt = var(t, 2);
      const auto u = c.velocity_jet(jx, jy, jt);
      const Jet p = c.pressure_jet(jx, jy, jt);
      const Vec2 f = c.forcing(x, nu, t);
      for (int k = 0; k < 2; ++k) {
        double r = -nu * (u[k].dxx + u[k].dyy) + p.d[k];
        if (c.time_dependent) r += u[k].d[2] + u[0].v * u[k].d[0] + u[1].v * u[k].d[1];
        worst = std::max(worst, std::abs((k == 0 ? f.x : f.y) - r));
      }
    }
  return worst;
}

void check_case(const ManufacturedCase& c) {
  for (double nu : {1.0, 1e-3})
    for (double t : {0.0, 0.005}) {
      if (!c.time_dependent && t != 0.0) continue;
      const double r = forcing_residual(c, nu, t);
      if (!(r <= 1e-10)) {
        std::ostringstream os;
        os << "case " << c.name << ": forcing residual " << r << " at nu = " << nu << ", t = " << t;
        throw Error(os.str());
      }
    }
  // pressure mean by a 2D Gauss tensor rule on a 16 x 16 grid
  const auto& g = gauss_line_3();
  double mean = 0.0;
  const int n = 16;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (std::size_t a = 0; a < g.points.size(); ++a)
        for (std::size_t b = 0; b < g.points.size(); ++b)
          mean += g.weights[a] * g.weights[b] / (n * n) *
                  c.pressure_at({(i + g.points[a]) / n, (j + g.points[b]) / n});
  if (!(std::abs(mean) <= 1e-12)) {
    std::ostringstream os;
    os << "case " << c.name << ": pressure mean " << mean << " is not zero";
    throw Error(os.str());
  }
}

const std::vector<ManufacturedCase>& builtin_cases() {
  static const std::vector<ManufacturedCase> cases = [] {
    auto c = make_cases();
    for (const auto& k : c) check_case(k);
    return c;
  }();
  return cases;
}

const ManufacturedCase& find_case(const std::string& name) {
  const auto& all = builtin_cases();
  for (const auto& c : all)
    if (c.name == name) return c;
  std::string known;
  for (const auto& c : all) known += (known.empty() ? "" : ", ") + c.name;
  throw InvalidArgument("unknown case '" + name + "' (known: " + known + ")");
}

}  // namespace ncr
