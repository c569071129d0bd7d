#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ncr/cases.hpp"
#include "ncr/linalg.hpp"
#include "ncr/stokes.hpp"

namespace ncr {

/// Skew-symmetrized convection (N - N^T) / 2 for a CR advecting field w
/// (2 nf vector dofs), where N[f, g] = sum_K integral (w . grad psi_g) psi_f
/// by the edge-midpoint rule, copied on both components.
CsrMatrix assemble_convection(const Triangulation& tri, std::span<const double> w);

/// Boundary half-edge field driving the Mps closure: f(x, t) plus whatever the
/// caller adds from the discrete iterates. Indexed by cell and point.
using CellField = std::function<Vec2(Index, const Vec2&)>;

struct TransientState {
  DofField velocity;  // CR vector, boundary dofs included
  DofField pressure;
  std::vector<double> flux;  // Mps boundary half-edge fluxes, empty otherwise
  double time = 0.0;
};

/// Projection (prediction-correction) stepping with fixed dt. The predictor
/// operator M + dt nu K and the projection saddle system are factored once.
class TransientSolver {
public:
  TransientSolver(const Triangulation& tri, SchemeKind scheme, double nu, double dt, bool lumped_projection = false);

  /// U* with boundary dofs set to `dirichlet` facet means; f is the forcing at t^n.
  std::vector<double> predict(const TransientState& s, const VectorFn& f, const VectorFn& dirichlet) const;
  /// Pressure increment making the corrected velocity discretely divergence
  /// free. `flux` is the Mps boundary flux at t^{n+1} (ignored otherwise);
  /// `dirichlet` is the boundary velocity at t^{n+1}.
  std::vector<double> pressure_update(const TransientState& s, std::span<const double> u_star,
                                      std::span<const double> flux, const VectorFn& dirichlet = {}) const;
  /// U^{n+1} = U* - dt Mt^{-1} (G dP + F dflux) on interior dofs.
  std::vector<double> correct(const TransientState& s, std::span<const double> u_star, std::span<const double> dp,
                              std::span<const double> flux) const;

  /// Mps closure flux: (f - (U* - U^n)/dt - (U^n . grad) U^n) . n on the boundary half-edges.
  std::vector<double> closure_flux(const TransientState& s, std::span<const double> u_star,
                                   const VectorFn& f) const;

  const StokesBlocks& blocks() const { return blocks_; }
  double dt() const { return dt_; }
  double nu() const { return nu_; }
  const CsrMatrix& mass() const { return mass_; }

private:
  const Triangulation& tri_;
  StokesBlocks blocks_;
  double nu_;
  double dt_;
  bool lumped_;
  VelocityDofs dofs_;
  CsrMatrix mass_;      // consistent, full numbering
  CsrMatrix mtilde_;    // M + dt nu K, full numbering
  CsrMatrix projection_mass_;  // Mt or lumped M, full numbering
  std::optional<Factorization> predictor_;   // free-free block of Mt
  std::optional<Factorization> corrector_;   // free-free block of the projection mass
  std::optional<BorderedFactorization> projection_;
  std::vector<double> lumped_diag_;
};

struct TransientOptions {
  double t_max = 0.01;
  double courant = 0.5;
  bool lumped_projection = false;
};

struct TransientRecord {
  int step = 0;
  double time = 0.0;
  double divergence = 0.0;  // max |D U^{n+1}|
  double energy = 0.0;      // U^T M U / 2
};

struct TransientResult {
  StokesSolution solution;
  StokesBlocks blocks;
  double dt = 0.0;
  int steps = 0;
  double initial_energy = 0.0;
  std::vector<TransientRecord> history;
};

/// Largest dt strictly below courant * h that divides t_max into whole steps.
double transient_time_step(double t_max, double courant, double h);

/// L2 projection of p onto the scheme's pressure space (zero mean).
DofField project_pressure(const Triangulation& tri, SchemeKind scheme, const ScalarFn& p);

/// Runs a time-dependent manufactured case from exact data at t = 0 to t_max.
TransientResult run_transient(const Triangulation& tri, SchemeKind scheme, double nu, const ManufacturedCase& c,
                              const TransientOptions& options = {});

}  // namespace ncr
