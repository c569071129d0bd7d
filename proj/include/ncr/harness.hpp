#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ncr/mesh.hpp"
#include "ncr/navier_stokes.hpp"
#include "ncr/stokes.hpp"

namespace ncr {

/// Generated mesh family, refined by the level n.
struct MeshSpec {
  enum class Family { Structured, Kershaw };
  Family family = Family::Structured;
  DiagonalMode mode = DiagonalMode::Alternating;
  double distortion = 0.0;
};

/// Builds the level-n mesh. Trio gets the boundary corners repaired when a
/// triangle carries two boundary edges, since its pressure space is singular there.
Triangulation make_mesh(const MeshSpec& spec, int n, SchemeKind scheme);

/// Errors below this are solver noise; orders computed from them are suppressed.
inline constexpr double kEocFloor = 1e-9;

struct EocFit {
  /// pairwise[i] relates level i-1 to level i; pairwise[0] is always empty.
  std::vector<std::optional<double>> pairwise;
  /// Least-squares slope of log(err) against log(h) over all levels.
  std::optional<double> slope;
  /// log(err_first / err_last) / log(h_first / h_last).
  std::optional<double> endpoints;
};

EocFit fit_eoc(std::span<const double> errors, std::span<const double> hs, double floor = kEocFloor);

struct LevelResult {
  std::string scheme;
  std::string case_name;
  double nu = 1.0;
  int n = 0;
  double h = 0.0;
  std::size_t ncells = 0;
  double err_u = 0.0;
  double err_p = 0.0;
  std::optional<double> eoc_u;
  std::optional<double> eoc_p;
  double wall_ms = 0.0;
  double max_divergence = 0.0;  // transient runs, largest per-step max |D U|; not part of the CSV
};

struct LevelFailure {
  int n = 0;
  double nu = 0.0;
  std::string scheme;
  std::string message;
  bool numerical = true;  // false for usage-level errors
};

struct ConvergenceReport {
  std::vector<LevelResult> rows;  // sorted by h descending
  std::optional<double> slope_u;
  std::optional<double> slope_p;
  std::optional<double> endpoints_u;
  std::optional<double> endpoints_p;
  std::vector<LevelFailure> failures;
  std::vector<std::string> warnings;

  bool ok() const { return failures.empty(); }
};

struct HarnessOptions {
  MeshSpec mesh;
  /// Serial run with wall_ms forced to 0 so that output is bitwise reproducible.
  bool deterministic = false;
  /// Worker cap; 0 means NCR_THREADS or the hardware concurrency.
  int threads = 0;
  TransientOptions transient;
};

struct SolveSummary {
  LevelResult row;  // n = 0; errors relative to the exact norms on this mesh
  std::vector<std::string> warnings;
  int steps = 0;  // transient cases only
  double dt = 0.0;
};

/// One solve on a given mesh with the same error measures as the sweeps.
SolveSummary solve_case(const Triangulation& tri, SchemeKind scheme, const ManufacturedCase& c, double nu,
                        const HarnessOptions& options = {});

/// Worker count from NCR_THREADS (when set and positive) capped by `requested`.
int worker_count(int requested, std::size_t jobs);

/// Solves the case on every level and fills the error and order columns.
/// Time-dependent cases run the projection scheme up to options.transient.t_max.
/// A failing level is recorded in `failures` and the remaining levels still run.
ConvergenceReport run_convergence(SchemeKind scheme, const ManufacturedCase& c, double nu, std::vector<int> levels,
                                  const HarnessOptions& options = {});

struct TippingPoint {
  std::string scheme;
  /// Largest nu below which the velocity error grows like 1/nu, if any.
  std::optional<double> nu;
};

struct ViscosityReport {
  std::vector<LevelResult> rows;  // per scheme, nu descending
  std::vector<TippingPoint> tipping;
  std::vector<LevelFailure> failures;

  bool ok() const { return failures.empty(); }
};

/// Local growth exponent log(e2/e1) / log(nu1/nu2) at which a pair of
/// viscosities counts as being in the 1/nu regime.
inline constexpr double kInverseNuExponent = 0.9;

ViscosityReport run_viscosity_sweep(std::span<const SchemeKind> schemes, const ManufacturedCase& c,
                                    std::vector<double> nus, int n, const HarnessOptions& options = {});

inline constexpr const char* kCsvHeader = "scheme,case,nu,n,h,ncells,err_u,err_p,eoc_u,eoc_p,wall_ms";

void write_csv(std::span<const LevelResult> rows, std::ostream& out);
void write_csv(std::span<const LevelResult> rows, const std::filesystem::path& path);
std::vector<LevelResult> read_csv(std::istream& in);
std::vector<LevelResult> read_csv(const std::filesystem::path& path);

}  // namespace ncr
