#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ncr/error.hpp"
#include "ncr/harness.hpp"

using namespace ncr;

namespace {

constexpr int kUsage = 1;
constexpr int kNumerical = 2;

struct Config {
  std::string scheme = "mps";
  std::string case_name;  // per-subcommand default when empty
  std::vector<double> nus;
  std::vector<int> levels;
  int n = 10;
  std::string mode = "alternating";
  double distortion = 0.6;
  std::string mesh_file;
  double t_max = 0.01;
  double cfl = 0.5;
  std::string out;
  bool deterministic = false;
  bool lumped = false;
};

MeshSpec mesh_spec(const Config& cfg) {
  MeshSpec spec;
  if (cfg.mode == "kershaw") {
    spec.family = MeshSpec::Family::Kershaw;
    spec.distortion = cfg.distortion;
  } else {
    spec.mode = cfg.mode == "uniform" ? DiagonalMode::Uniform : DiagonalMode::Alternating;
  }
  return spec;
}

HarnessOptions harness_options(const Config& cfg) {
  HarnessOptions o;
  o.mesh = mesh_spec(cfg);
  o.deterministic = cfg.deterministic;
  o.transient.t_max = cfg.t_max;
  o.transient.courant = cfg.cfl;
  o.transient.lumped_projection = cfg.lumped;
  return o;
}

std::vector<SchemeKind> parse_schemes(const std::string& list) {
  if (list == "all") return {SchemeKind::CrP0, SchemeKind::TrioP0P1, SchemeKind::Mps};
  std::vector<SchemeKind> out;
  std::istringstream ss(list);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(parse_scheme(item));
  return out;
}

std::string fmt(double v, const char* f = "%.3e") {
  char buf[48];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v, "%.2f") : "-"; }

void print_rows(const std::vector<LevelResult>& rows) {
  std::printf("%-6s %-10s %5s %10s %8s %12s %7s %12s %7s\n", "scheme", "nu", "n", "h", "ncells", "err_u", "eoc_u",
              "err_p", "eoc_p");
  for (const auto& r : rows)
    std::printf("%-6s %-10s %5d %10s %8zu %12s %7s %12s %7s\n", r.scheme.c_str(), fmt(r.nu, "%g").c_str(), r.n,
                fmt(r.h, "%.4g").c_str(), r.ncells, fmt(r.err_u).c_str(), fmt_opt(r.eoc_u).c_str(),
                fmt(r.err_p).c_str(), fmt_opt(r.eoc_p).c_str());
}

int report_failures(const std::vector<LevelFailure>& failures) {
  int code = 0;
  for (const auto& f : failures) {
    std::fprintf(stderr, "error: %s nu=%g n=%d: %s\n", f.scheme.c_str(), f.nu, f.n, f.message.c_str());
    code = std::max(code, f.numerical ? kNumerical : kUsage);
  }
  return code;
}

Triangulation load_or_generate(const Config& cfg, SchemeKind scheme) {
  if (!cfg.mesh_file.empty()) return read_mesh(cfg.mesh_file);
  return make_mesh(mesh_spec(cfg), cfg.n, scheme);
}

int cmd_mesh_gen(const Config& cfg) {
  const auto spec = mesh_spec(cfg);
  const auto tri = spec.family == MeshSpec::Family::Kershaw ? generate_kershaw(cfg.n, spec.distortion)
                                                            : generate_structured(cfg.n, spec.mode);
  if (cfg.out.empty())
    write_mesh(tri, std::cout);
  else
    write_mesh(tri, cfg.out);
  return 0;
}

int cmd_mesh_check(const std::string& path) {
  const auto tri = read_mesh(path);
  const auto rep = validate(tri);
  auto flag = [](bool ok) { return ok ? "pass" : "fail"; };
  std::printf("vertices %zu cells %zu facets %zu boundary_facets %zu\n", tri.num_vertices(), tri.num_cells(),
              tri.num_facets(), tri.num_boundary_facets());
  std::printf("h %.17g\n", tri.mesh_size());
  std::printf("orientation %s\n", flag(rep.orientation_ok));
  std::printf("euler %s (chi = %ld)\n", flag(rep.euler_ok), rep.euler_characteristic);
  std::printf("manifold %s\n", flag(rep.manifold_ok));
  std::printf("normals %s\n", flag(rep.normals_ok));
  std::printf("hypothesis_41 %s", flag(rep.hypothesis_41()));
  if (!rep.hypothesis_41()) {
    std::printf(" (cells:");
    for (auto c : rep.hypothesis_41_violations) std::printf(" %lld", static_cast<long long>(c));
    std::printf(")");
  }
  std::printf("\n");
  return rep.structural_ok() ? 0 : kNumerical;
}

int cmd_single(const Config& cfg, bool transient) {
  const auto scheme = parse_scheme(cfg.scheme);
  const auto& c = find_case(cfg.case_name);
  if (c.time_dependent != transient)
    throw InvalidArgument("case '" + c.name + "' is " + (c.time_dependent ? "time dependent; use ns" : "steady; use stokes"));
  if (cfg.nus.size() != 1) throw InvalidArgument("give exactly one --nu");
  const auto tri = load_or_generate(cfg, scheme);
  if (scheme == SchemeKind::TrioP0P1) {
    const auto rep = validate(tri);
    if (!rep.hypothesis_41()) {
      std::fprintf(stderr, "warning: cells with two boundary edges:");
      for (auto c : rep.hypothesis_41_violations) std::fprintf(stderr, " %lld", static_cast<long long>(c));
      std::fprintf(stderr, "\n");
    }
  }
  const auto s = solve_case(tri, scheme, c, cfg.nus[0], harness_options(cfg));
  for (const auto& w : s.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::printf("scheme %s case %s nu %g h %.6g ncells %zu\n", s.row.scheme.c_str(), c.name.c_str(), cfg.nus[0],
              s.row.h, s.row.ncells);
  if (transient)
    std::printf("steps %d dt %.6g max_divergence %.3e\n", s.steps, s.dt, s.row.max_divergence);
  std::printf("eps0_u %.6e\neps0_p %.6e\n", s.row.err_u, s.row.err_p);
  return 0;
}

int cmd_convergence(const Config& cfg) {
  const auto scheme = parse_scheme(cfg.scheme);
  const auto& c = find_case(cfg.case_name);
  if (cfg.nus.size() != 1) throw InvalidArgument("give exactly one --nu");
  const auto r = run_convergence(scheme, c, cfg.nus[0], cfg.levels, harness_options(cfg));
  for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  print_rows(r.rows);
  std::printf("least-squares order: u %s  p %s\n", fmt_opt(r.slope_u).c_str(), fmt_opt(r.slope_p).c_str());
  std::printf("first-to-last order: u %s  p %s\n", fmt_opt(r.endpoints_u).c_str(), fmt_opt(r.endpoints_p).c_str());
  if (!cfg.out.empty()) write_csv(r.rows, cfg.out);
  return report_failures(r.failures);
}

int cmd_visc_sweep(const Config& cfg) {
  const auto schemes = parse_schemes(cfg.scheme);
  const auto& c = find_case(cfg.case_name);
  const auto r = run_viscosity_sweep(schemes, c, cfg.nus, cfg.n, harness_options(cfg));
  print_rows(r.rows);
  for (const auto& t : r.tipping)
    std::printf("tipping point %s: %s\n", t.scheme.c_str(), t.nu ? fmt(*t.nu, "nu = %g").c_str() : "none");
  if (!cfg.out.empty()) write_csv(r.rows, cfg.out);
  return report_failures(r.failures);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crouzeix-Raviart Stokes / Navier-Stokes solver with CR-P0, P0+P1 and MPFA pressure schemes"};
  app.require_subcommand(1);
  Config cfg;

  auto add_problem = [&](CLI::App* sub, bool nu_list) {
    sub->add_option("--scheme", cfg.scheme, nu_list ? "crp0|trio|mps, comma separated, or all" : "crp0|trio|mps")
        ->capture_default_str();
    sub->add_option("--case", cfg.case_name, "manufactured case slug");
    auto* nu = sub->add_option("--nu", cfg.nus, nu_list ? "viscosities, comma separated" : "viscosity (default 1)")
                   ->check(CLI::PositiveNumber);
    nu->delimiter(',');
    if (!nu_list) nu->expected(1);
  };
  // levels replace --n in convergence runs
  auto add_mesh = [&](CLI::App* sub, bool with_n, bool with_file) {
    CLI::Option* n = nullptr;
    if (with_n) n = sub->add_option("--n", cfg.n, "squares per side")->check(CLI::PositiveNumber)->capture_default_str();
    auto* mode = sub->add_option("--mode", cfg.mode, "alternating|uniform|kershaw")
                     ->check(CLI::IsMember({"alternating", "uniform", "kershaw"}))
                     ->capture_default_str();
    auto* dist = sub->add_option("--distortion", cfg.distortion, "Kershaw distortion")->capture_default_str();
    if (with_file) {
      auto* file = sub->add_option("--mesh", cfg.mesh_file, "mesh file instead of a generated grid")
                       ->check(CLI::ExistingFile);
      file->excludes(n)->excludes(mode)->excludes(dist);
    }
  };
  auto add_transient = [&](CLI::App* sub) {
    sub->add_option("--t-max", cfg.t_max, "final time")->check(CLI::NonNegativeNumber)->capture_default_str();
    sub->add_option("--cfl", cfg.cfl, "time step dt < C h")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_flag("--lumped", cfg.lumped, "lumped mass in the projection step");
  };

  auto* mesh = app.add_subcommand("mesh", "generate or check meshes");
  mesh->require_subcommand(1);
  auto* gen = mesh->add_subcommand("gen", "write a generated mesh");
  add_mesh(gen, true, false);
  gen->add_option("--out", cfg.out, "output file (stdout when omitted)");
  auto* check = mesh->add_subcommand("check", "validate a mesh file");
  std::string check_path;
  check->add_option("file", check_path, "mesh file")->required()->check(CLI::ExistingFile);

  auto* stokes = app.add_subcommand("stokes", "single steady Stokes solve");
  add_problem(stokes, false);
  add_mesh(stokes, true, true);

  auto* ns = app.add_subcommand("ns", "single Navier-Stokes run");
  add_problem(ns, false);
  add_mesh(ns, true, true);
  add_transient(ns);

  auto* conv = app.add_subcommand("convergence", "errors and orders over refinement levels");
  add_problem(conv, false);
  conv->add_option("--levels", cfg.levels, "grid sizes n, comma separated")
      ->delimiter(',')
      ->required()
      ->check(CLI::PositiveNumber);
  add_mesh(conv, false, false);
  add_transient(conv);
  conv->add_option("--out", cfg.out, "CSV output file");
  conv->add_flag("--deterministic", cfg.deterministic, "serial levels and zero wall times");

  auto* visc = app.add_subcommand("visc-sweep", "errors against viscosity on a fixed grid");
  add_problem(visc, true);
  add_mesh(visc, true, false);
  visc->add_option("--out", cfg.out, "CSV output file");
  visc->add_flag("--deterministic", cfg.deterministic, "serial runs and zero wall times");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kUsage;
  }

  if (cfg.case_name.empty()) cfg.case_name = ns->parsed() ? "green-taylor" : "noflow-sin";
  if (cfg.nus.empty()) cfg.nus = visc->parsed() ? std::vector<double>{1.0, 1e-1, 1e-2, 1e-3} : std::vector<double>{1.0};

  try {
    if (gen->parsed()) return cmd_mesh_gen(cfg);
    if (check->parsed()) return cmd_mesh_check(check_path);
    if (stokes->parsed()) return cmd_single(cfg, false);
    if (ns->parsed()) return cmd_single(cfg, true);
    if (conv->parsed()) return cmd_convergence(cfg);
    if (visc->parsed()) return cmd_visc_sweep(cfg);
  } catch (const NearSingularLocalSystem& e) {
    std::fprintf(stderr, "error: %s (vertex %zu)\n", e.what(), e.vertex());
    return kNumerical;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNumerical;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  }
  return kUsage;
}
