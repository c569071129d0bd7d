#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "ncr/fem.hpp"
#include "ncr/jet.hpp"

namespace ncr {

/// Closed-form Stokes / Navier-Stokes solution on the unit square with its forcing
/// f = -nu lap u + grad p (+ du/dt + (u . grad) u when time dependent).
struct ManufacturedCase {
  std::string name;
  std::string description;
  bool zero_velocity = false;
  bool time_dependent = false;
  std::function<std::array<Jet, 2>(const Jet&, const Jet&, const Jet&)> velocity_jet;
  std::function<Jet(const Jet&, const Jet&, const Jet&)> pressure_jet;
  std::function<Vec2(const Vec2&, double nu, double t)> forcing;

  Vec2 velocity_at(const Vec2& x, double t = 0.0) const;
  double pressure_at(const Vec2& x, double t = 0.0) const;
  Vec2 pressure_gradient_at(const Vec2& x, double t = 0.0) const;

  VectorFn u(double t = 0.0) const;
  ScalarFn p(double t = 0.0) const;
  VectorFn grad_p(double t = 0.0) const;
  VectorFn f(double nu, double t = 0.0) const;
};

/// All built-in cases; residual and zero-mean checks run on first use.
const std::vector<ManufacturedCase>& builtin_cases();
/// Throws InvalidArgument listing the known slugs.
const ManufacturedCase& find_case(const std::string& name);

/// Max pointwise |f - (du/dt - nu lap u + (u.grad)u + grad p)| on a 5 x 5 grid,
/// derivatives from automatic differentiation.
double forcing_residual(const ManufacturedCase& c, double nu, double t = 0.0);
/// Throws Error naming the case if the forcing residual or the pressure mean is off.
void check_case(const ManufacturedCase& c);

}  // namespace ncr
