#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ncr/cases.hpp"
#include "ncr/fem.hpp"
#include "ncr/linalg.hpp"
#include "ncr/mpfa.hpp"

namespace ncr {

enum class SchemeKind { CrP0, TrioP0P1, Mps };

std::string_view scheme_name(SchemeKind s);
/// Accepts "cr", "crp0", "trio", "mps" (case-insensitive).
SchemeKind parse_scheme(std::string_view name);
Layout pressure_layout(SchemeKind s);

/// Scheme operators in full (unreduced) numbering.
struct StokesBlocks {
  SchemeKind scheme;
  CsrMatrix stiffness;    // 2 nf x 2 nf, unscaled
  CsrMatrix gradient;     // 2 nf x np: momentum pressure coupling
  CsrMatrix divergence;   // np x 2 nf: continuity rows (b(u, q) = q^T B u)
  std::vector<Constraint> pressure_means;  // in pressure numbering
  std::optional<MpfaOperator> mpfa;
  std::size_t num_pressure = 0;
};

StokesBlocks make_blocks(const Triangulation& tri, SchemeKind scheme);

/// Boundary-forcing term for the momentum rows: zero except for Mps, where it
/// is fmat * (half-edge fluxes of g).
std::vector<double> boundary_forcing(const StokesBlocks& blocks, const VectorFn& g);

/// Right-hand side of the continuity rows for Dirichlet data g. Zero except
/// for the P1 rows of Trio, where (u, grad q) = integral over the boundary of
/// (g . n) q when g has a normal component.
std::vector<double> continuity_rhs(const Triangulation& tri, const StokesBlocks& blocks, const VectorFn& g);

struct StokesSystem {
  LinearSystem system;
  VelocityDofs dofs;
  std::vector<double> prescribed;  // full velocity vector with Dirichlet values
  std::vector<std::string> warnings;
  std::vector<double> boundary_flux;  // Mps: half-edge fluxes of f
};

/// Dirichlet data: facet means of `dirichlet` on boundary facets (zero when empty).
StokesSystem assemble_stokes(const Triangulation& tri, const StokesBlocks& blocks, double nu, const VectorFn& f,
                             const VectorFn& dirichlet = {});
StokesSystem assemble_stokes(const Triangulation& tri, SchemeKind scheme, double nu, const VectorFn& f,
                             const VectorFn& dirichlet = {});

struct StokesSolution {
  DofField velocity;
  DofField pressure;
  SchemeKind scheme;
  double nu;
  std::vector<double> multipliers;
  std::vector<std::string> warnings;
  std::vector<double> boundary_flux;  // Mps only: half-edge fluxes closing the boundary fans
};

StokesSolution solve_stokes(const Triangulation& tri, const StokesBlocks& blocks, double nu, const VectorFn& f,
                            const VectorFn& dirichlet = {});
StokesSolution solve_stokes(const Triangulation& tri, SchemeKind scheme, double nu, const ManufacturedCase& c);

/// ||p_h - p||_L2. For Mps the pressure is measured through its MPFA
/// reconstruction, affine on each quadrangle.
double pressure_l2_error(const Triangulation& tri, const StokesBlocks& blocks, const StokesSolution& sol,
                         const ScalarFn& p);

/// Multipliers larger than this times ||rhs|| flag an inf-sup breakdown.
inline constexpr double kMultiplierLimit = 1e8;

}  // namespace ncr
