#pragma once

#include <functional>
#include <vector>

#include "ncr/mesh.hpp"
#include "ncr/quadrature.hpp"
#include "ncr/sparse.hpp"

namespace ncr {

using ScalarFn = std::function<double(const Vec2&)>;
using VectorFn = std::function<Vec2(const Vec2&)>;

enum class Layout { CrScalar, CrVector, P0, P1, P0PlusP1 };

std::size_t layout_size(const Triangulation& tri, Layout layout);

struct DofField {
  Layout layout = Layout::P0;
  std::vector<double> values;

  static DofField zeros(const Triangulation& tri, Layout layout) {
    return {layout, std::vector<double>(layout_size(tri, layout), 0.0)};
  }
};

/// Vector CR dofs: x components of every facet, then y components.
inline std::int64_t cr_dof(const Triangulation& tri, Index f, int comp) {
  return static_cast<std::int64_t>(comp) * static_cast<std::int64_t>(tri.num_facets()) + f;
}

/// psi_f on cell c, where f is local facet k: 1 - 2 lambda_k(x).
double cr_basis(const Triangulation& tri, Index c, int k, const Vec2& x);
/// Constant gradient of the same basis function on c.
Vec2 cr_basis_gradient(const Triangulation& tri, Index c, int k);
/// Gradient of the barycentric coordinate lambda_k on c (the P1 hat gradient).
Vec2 p1_gradient(const Triangulation& tri, Index c, int k);

/// Facet means by 3-point Gauss.
DofField interpolate_cr(const Triangulation& tri, const ScalarFn& g);
DofField interpolate_cr(const Triangulation& tri, const VectorFn& g);

/// Point values of discrete fields inside cell c.
double evaluate_scalar(const Triangulation& tri, const DofField& field, Index c, const std::array<double, 3>& bary);
Vec2 evaluate_vector(const Triangulation& tri, const DofField& field, Index c, const std::array<double, 3>& bary);

/// Unscaled CR stiffness, components = 1 (nf x nf) or 2 (block diagonal).
CsrMatrix assemble_stiffness(const Triangulation& tri, int components = 2);
CsrMatrix assemble_mass(const Triangulation& tri, bool lumped = false, int components = 2);
/// ncells x 2 nf, entry = integral over the cell of d psi_f / d x_comp.
CsrMatrix assemble_divergence(const Triangulation& tri);
/// nvertices x 2 nf, entry = integral of psi_f (grad phi_j)_comp.
CsrMatrix assemble_p1_gradient_coupling(const Triangulation& tri);
/// Integrals of the P1 hat functions.
std::vector<double> p1_weights(const Triangulation& tri);
/// Consistent P1 mass matrix.
CsrMatrix assemble_p1_mass(const Triangulation& tri);

/// (f, psi) for every vector dof, degree-5 rule.
std::vector<double> load_vector(const Triangulation& tri, const VectorFn& f);

/// Broken H1 seminorm of a CR scalar or vector field.
double broken_norm(const Triangulation& tri, const DofField& field);

double l2_norm(const Triangulation& tri, const ScalarFn& g, const TriangleRule& rule = triangle_degree5());
double l2_norm(const Triangulation& tri, const VectorFn& g, const TriangleRule& rule = triangle_degree5());
double l2_norm(const Triangulation& tri, const DofField& field);
/// ||field - exact||; a null exact function means zero.
double l2_error(const Triangulation& tri, const DofField& field, const ScalarFn& exact,
                const TriangleRule& rule = triangle_degree5());
double l2_error(const Triangulation& tri, const DofField& field, const VectorFn& exact,
                const TriangleRule& rule = triangle_degree5());
double integrate(const Triangulation& tri, const ScalarFn& g, const TriangleRule& rule = triangle_degree5());
double integrate(const Triangulation& tri, const DofField& field);

/// Velocity error: plain ||u_h|| when the exact velocity vanishes, else relative.
double epsilon0_velocity(const Triangulation& tri, const DofField& uh, const VectorFn& u, bool zero_velocity,
                         double exact_norm);
double epsilon0_pressure(const Triangulation& tri, const DofField& ph, const ScalarFn& p, double exact_norm);

/// Split of vector CR dofs into free (interior) and prescribed (boundary) ones.
struct VelocityDofs {
  std::vector<std::int64_t> free;
  std::vector<std::int64_t> fixed;
  std::vector<std::int64_t> to_free;  // -1 on fixed dofs
};
VelocityDofs velocity_dofs(const Triangulation& tri);

}  // namespace ncr
