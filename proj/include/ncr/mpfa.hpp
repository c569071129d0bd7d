#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ncr/fem.hpp"
#include "ncr/macro_element.hpp"
#include "ncr/sparse.hpp"

namespace ncr {

/// Eliminated local gradient reconstruction on one macro-element.
///
/// On quadrangle i the gradient is
///   G_i = sum_l coeff[i][l] * qbar_l + sum_b flux_coeff[i][b] * flux_b
/// where l runs over the fan cells and b over the (0 or 2) boundary half-edges
/// of the fan, first and last edge respectively.
struct LocalReconstruction {
  MacroElement macro;
  std::vector<std::vector<Vec2>> coeff;
  std::vector<std::vector<Vec2>> flux_coeff;
  /// Auxiliary edge values: qtilde = aux_cells * qbar + aux_flux * flux.
  std::vector<std::vector<double>> aux_cells;
  std::vector<std::vector<double>> aux_flux;
  /// 1-norm condition number of the local system.
  double condition = 0.0;

  Vec2 gradient(std::size_t i, std::span<const double> cell_values, std::span<const double> flux = {}) const;
  std::vector<double> auxiliary(std::span<const double> cell_values, std::span<const double> flux = {}) const;
};

inline constexpr double kLocalConditionLimit = 1e12;

/// (3 / (2|K_i|)) (qt_i S_{i,i} + qt_{i+1} S_{i+1,i} + qbar_i S_{0,i})
Vec2 local_gradient_formula(const MacroElement& m, std::size_t i, double qt_i, double qt_ip1, double qbar_i);

/// Flux continuity across every edge of an interior fan.
LocalReconstruction eliminate_interior(const MacroElement& m);
/// Continuity on inner edges plus prescribed normal flux on the two boundary half-edges.
LocalReconstruction eliminate_boundary(const MacroElement& m);
/// Dispatches on m.is_boundary.
LocalReconstruction eliminate(const MacroElement& m);

/// Boundary half-edge from a boundary vertex to the midpoint of a boundary facet.
struct HalfEdge {
  Index facet;
  Index vertex;
  Index cell;
  Vec2 from;
  Vec2 to;
  Vec2 normal;  // unit, outward
};

/// Global affine gradient operator: G_h(q) tested against psi_g e_comp equals
/// (gmat q + fmat flux)[dof(g, comp)].
struct MpfaOperator {
  CsrMatrix gmat;  // 2 nf x ncells
  CsrMatrix fmat;  // 2 nf x half_edges
  std::vector<HalfEdge> half_edges;
  std::vector<LocalReconstruction> local;  // one per vertex
  /// half-edge index of fan edge 0 and fan edge N-1 per boundary vertex, -1 otherwise
  std::vector<std::array<std::int64_t, 2>> vertex_half_edges;

  std::vector<double> g0vec(std::span<const double> flux) const { return fmat * flux; }
};

MpfaOperator assemble_mpfa(const Triangulation& tri);

/// Half-edge fluxes of a vector field, 2-point Gauss per half-edge.
std::vector<double> boundary_flux(const MpfaOperator& op, const VectorFn& f);
/// Same, for a field that depends on the cell containing the half-edge.
std::vector<double> boundary_flux(const MpfaOperator& op, const std::function<Vec2(Index, const Vec2&)>& f);

struct QuadrangleGradient {
  Index vertex;
  Index cell;
  double area;
  Vec2 centroid;
  Vec2 gradient;
};

std::vector<QuadrangleGradient> reconstruct_field(const Triangulation& tri, const MpfaOperator& op,
                                                  std::span<const double> pressure, std::span<const double> flux);

/// L2 distance between the reconstructed pressure, affine on each quadrangle
/// (q_K + G.(x - x_K)), and p.
double reconstruction_l2_error(const Triangulation& tri, const MpfaOperator& op, std::span<const double> pressure,
                               std::span<const double> flux, const ScalarFn& p);

}  // namespace ncr
