#include "ncr/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "ncr/error.hpp"

namespace ncr {

namespace {

bool usable(double e, double floor) { return std::isfinite(e) && e >= floor; }

// Runs job(i) for i in [0, count) on up to `workers` threads. Results are
// written by index, so the order of completion does not matter.
void run_jobs(std::size_t count, int workers, const std::function<void(std::size_t)>& job) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  const auto nthreads = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
  for (std::size_t t = 0; t < nthreads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) job(i);
    });
}

struct Measured {
  LevelResult row;
  double abs_u = 0.0;  // plain ||u_h|| or ||u_h - u||
  double abs_p = 0.0;
  double norm_u = 0.0;  // exact norms on this mesh
  double norm_p = 0.0;
  std::vector<std::string> warnings;
  int steps = 0;
  double dt = 0.0;
};

Measured measure(const Triangulation& tri, SchemeKind scheme, const ManufacturedCase& c, double nu,
                 const HarnessOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  Measured m;
  m.row.scheme = std::string(scheme_name(scheme));
  m.row.case_name = c.name;
  m.row.nu = nu;
  const double t = c.time_dependent ? options.transient.t_max : 0.0;

  StokesSolution sol;
  StokesBlocks blocks;
  if (c.time_dependent) {
    auto r = run_transient(tri, scheme, nu, c, options.transient);
    sol = std::move(r.solution);
    blocks = std::move(r.blocks);
    m.steps = r.steps;
    m.dt = r.dt;
    for (const auto& rec : r.history) m.row.max_divergence = std::max(m.row.max_divergence, rec.divergence);
  } else {
    blocks = make_blocks(tri, scheme);
    sol = solve_stokes(tri, blocks, nu, c.f(nu), c.zero_velocity ? VectorFn{} : c.u());
  }

  m.abs_u = c.zero_velocity ? l2_norm(tri, sol.velocity) : l2_error(tri, sol.velocity, c.u(t));
  m.abs_p = pressure_l2_error(tri, blocks, sol, c.p(t));
  m.norm_u = c.zero_velocity ? 0.0 : l2_norm(tri, c.u(t));
  m.norm_p = l2_norm(tri, c.p(t));
  const auto stop = std::chrono::steady_clock::now();

  m.row.h = tri.mesh_size();
  m.row.ncells = tri.num_cells();
  m.row.wall_ms = options.deterministic ? 0.0 : std::chrono::duration<double, std::milli>(stop - start).count();
  m.warnings = sol.warnings;
  return m;
}

struct LevelOutcome {
  std::optional<Measured> result;
  std::optional<LevelFailure> failure;
};

LevelOutcome solve_level(SchemeKind scheme, const ManufacturedCase& c, double nu, int n,
                         const HarnessOptions& options) {
  LevelOutcome out;
  try {
    out.result = measure(make_mesh(options.mesh, n, scheme), scheme, c, nu, options);
    out.result->row.n = n;
    for (auto& w : out.result->warnings) w = "n=" + std::to_string(n) + ": " + w;
  } catch (const NumericalError& e) {
    out.failure = LevelFailure{n, nu, std::string(scheme_name(scheme)), e.what(), true};
  } catch (const Error& e) {
    out.failure = LevelFailure{n, nu, std::string(scheme_name(scheme)), e.what(), false};
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw ParseError("bad number '" + s + "'", line);
  return v;
}

long parse_integer(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0') throw ParseError("bad integer '" + s + "'", line);
  return v;
}

}  // namespace

Triangulation make_mesh(const MeshSpec& spec, int n, SchemeKind scheme) {
  Triangulation tri = spec.family == MeshSpec::Family::Kershaw ? generate_kershaw(n, spec.distortion)
                                                                 : generate_structured(n, spec.mode);
  if (scheme == SchemeKind::TrioP0P1 && !validate(tri).hypothesis_41()) tri = repair_boundary_corners(tri);
  return tri;
}

EocFit fit_eoc(std::span<const double> errors, std::span<const double> hs, double floor) {
  if (errors.size() != hs.size()) throw InvalidArgument("fit_eoc: errors and mesh sizes differ in length");
  EocFit fit;
  fit.pairwise.resize(errors.size());
  for (std::size_t i = 1; i < errors.size(); ++i) {
    if (!usable(errors[i - 1], floor) || !usable(errors[i], floor) || hs[i - 1] == hs[i]) continue;
    fit.pairwise[i] = std::log(errors[i - 1] / errors[i]) / std::log(hs[i - 1] / hs[i]);
  }

  if (errors.size() < 2) return fit;
  if (!std::all_of(errors.begin(), errors.end(), [&](double e) { return usable(e, floor); })) return fit;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    mx += std::log(hs[i]);
    my += std::log(errors[i]);
  }
  mx /= static_cast<double>(errors.size());
  my /= static_cast<double>(errors.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    const double dx = std::log(hs[i]) - mx;
    sxy += dx * (std::log(errors[i]) - my);
    sxx += dx * dx;
  }
  if (sxx > 0.0) fit.slope = sxy / sxx;
  if (hs.front() != hs.back())
    fit.endpoints = std::log(errors.front() / errors.back()) / std::log(hs.front() / hs.back());
  return fit;
}

SolveSummary solve_case(const Triangulation& tri, SchemeKind scheme, const ManufacturedCase& c, double nu,
                        const HarnessOptions& options) {
  if (!(nu > 0.0)) throw InvalidArgument("viscosity must be positive");
  auto m = measure(tri, scheme, c, nu, options);
  SolveSummary s;
  s.row = m.row;
  s.row.n = 0;
  s.row.err_u = c.zero_velocity ? m.abs_u : m.abs_u / m.norm_u;
  s.row.err_p = m.abs_p / m.norm_p;
  s.warnings = std::move(m.warnings);
  s.steps = m.steps;
  s.dt = m.dt;
  return s;
}

int worker_count(int requested, std::size_t jobs) {
  int n = requested > 0 ? requested : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("NCR_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return std::max(1, std::min<int>(n, static_cast<int>(std::max<std::size_t>(jobs, 1))));
}

ConvergenceReport run_convergence(SchemeKind scheme, const ManufacturedCase& c, double nu, std::vector<int> levels,
                                  const HarnessOptions& options) {
  if (levels.empty()) throw InvalidArgument("convergence: no levels given");
  if (!(nu > 0.0)) throw InvalidArgument("convergence: viscosity must be positive");
  for (int n : levels)
    if (n < 1) throw InvalidArgument("convergence: levels must be positive");
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  std::vector<LevelOutcome> outcomes(levels.size());
  const int workers = options.deterministic ? 1 : worker_count(options.threads, levels.size());
  run_jobs(levels.size(), workers, [&](std::size_t i) { outcomes[i] = solve_level(scheme, c, nu, levels[i], options); });

  ConvergenceReport report;
  const Measured* finest = nullptr;
  for (const auto& o : outcomes) {
    if (o.failure) report.failures.push_back(*o.failure);
    if (!o.result) continue;
    finest = &*o.result;
    report.warnings.insert(report.warnings.end(), finest->warnings.begin(), finest->warnings.end());
  }
  if (!finest) return report;

  for (const auto& o : outcomes) {
    if (!o.result) continue;
    LevelResult row = o.result->row;
    row.err_u = c.zero_velocity ? o.result->abs_u : o.result->abs_u / finest->norm_u;
    row.err_p = o.result->abs_p / finest->norm_p;
    report.rows.push_back(row);
  }
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const LevelResult& a, const LevelResult& b) { return a.h > b.h; });

  std::vector<double> hs, eu, ep;
  for (const auto& r : report.rows) {
    hs.push_back(r.h);
    eu.push_back(r.err_u);
    ep.push_back(r.err_p);
  }
  const auto fu = fit_eoc(eu, hs);
  const auto fp = fit_eoc(ep, hs);
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    report.rows[i].eoc_u = fu.pairwise[i];
    report.rows[i].eoc_p = fp.pairwise[i];
  }
  report.slope_u = fu.slope;
  report.slope_p = fp.slope;
  report.endpoints_u = fu.endpoints;
  report.endpoints_p = fp.endpoints;
  return report;
}

ViscosityReport run_viscosity_sweep(std::span<const SchemeKind> schemes, const ManufacturedCase& c,
                                    std::vector<double> nus, int n, const HarnessOptions& options) {
  if (schemes.empty() || nus.empty()) throw InvalidArgument("visc-sweep: need at least one scheme and one viscosity");
  if (n < 1) throw InvalidArgument("visc-sweep: n must be positive");
  for (double nu : nus)
    if (!(nu > 0.0)) throw InvalidArgument("visc-sweep: viscosities must be positive");
  std::sort(nus.begin(), nus.end(), std::greater<>());
  nus.erase(std::unique(nus.begin(), nus.end()), nus.end());

  const std::size_t jobs = schemes.size() * nus.size();
  std::vector<LevelOutcome> outcomes(jobs);
  const int workers = options.deterministic ? 1 : worker_count(options.threads, jobs);
  run_jobs(jobs, workers, [&](std::size_t k) {
    outcomes[k] = solve_level(schemes[k / nus.size()], c, nus[k % nus.size()], n, options);
  });

  ViscosityReport report;
  for (std::size_t s = 0; s < schemes.size(); ++s) {
    std::vector<double> errs, vis;
    for (std::size_t j = 0; j < nus.size(); ++j) {
      const auto& o = outcomes[s * nus.size() + j];
      if (o.failure) report.failures.push_back(*o.failure);
      if (!o.result) continue;
      const auto& m = *o.result;
      LevelResult row = m.row;
      // same mesh for every nu, so each point normalizes by its own exact norms
      row.err_u = c.zero_velocity ? m.abs_u : m.abs_u / m.norm_u;
      row.err_p = m.abs_p / m.norm_p;
      report.rows.push_back(row);
      errs.push_back(row.err_u);
      vis.push_back(row.nu);
    }

    TippingPoint tp{std::string(scheme_name(schemes[s])), std::nullopt};
    // walk from the smallest nu upwards while each step stays in the 1/nu regime
    for (std::size_t k = errs.size(); k-- > 1;) {
      const double growth = std::log(errs[k] / errs[k - 1]) / std::log(vis[k - 1] / vis[k]);
      if (!(growth >= kInverseNuExponent)) break;
      tp.nu = vis[k - 1];
    }
    report.tipping.push_back(tp);
  }
  return report;
}

void write_csv(std::span<const LevelResult> rows, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.scheme << ',' << r.case_name << ',' << format_double(r.nu) << ',' << r.n << ',' << format_double(r.h)
        << ',' << r.ncells << ',' << format_double(r.err_u) << ',' << format_double(r.err_p) << ','
        << (r.eoc_u ? format_double(*r.eoc_u) : "") << ',' << (r.eoc_p ? format_double(*r.eoc_p) : "") << ','
        << format_double(r.wall_ms) << '\n';
  }
}

void write_csv(std::span<const LevelResult> rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_csv(rows, out);
  if (!out) throw Error("failed writing " + path.string());
}

std::vector<LevelResult> read_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line) || line != kCsvHeader) throw ParseError("expected header '" + std::string(kCsvHeader) + "'", 1);
  std::vector<LevelResult> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 11) throw ParseError("expected 11 fields, got " + std::to_string(f.size()), lineno);
    LevelResult r;
    r.scheme = f[0];
    r.case_name = f[1];
    r.nu = parse_double(f[2], lineno);
    r.n = static_cast<int>(parse_integer(f[3], lineno));
    r.h = parse_double(f[4], lineno);
    r.ncells = static_cast<std::size_t>(parse_integer(f[5], lineno));
    r.err_u = parse_double(f[6], lineno);
    r.err_p = parse_double(f[7], lineno);
    if (!f[8].empty()) r.eoc_u = parse_double(f[8], lineno);
    if (!f[9].empty()) r.eoc_p = parse_double(f[9], lineno);
    r.wall_ms = parse_double(f[10], lineno);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<LevelResult> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return read_csv(in);
}

}  // namespace ncr
