#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "gqg/errors.hpp"
#include "gqg/harness.hpp"

namespace {

using namespace gqg;
using nlohmann::json;

struct Overrides {
  std::string config_path;
  std::string eps, grid, formulation, out;
  std::optional<double> t_end, dt;
  std::optional<int> jobs;
  std::optional<std::uint64_t> seed;
  bool disable_nonlinear = false;
  bool print_config = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON run configuration");
  cmd->add_option("--eps", o.eps, "eps value or comma-separated list");
  cmd->add_option("--grid", o.grid, "NX,NY,NZ (NZ is the vertical degree; NZ+1 nodes)");
  cmd->add_option("--t-end", o.t_end, "final time");
  cmd->add_option("--dt", o.dt, "fixed time step (default: auto)");
  cmd->add_option("--formulation", o.formulation, "gpv | primitive | limit");
  cmd->add_flag("--disable-nonlinear", o.disable_nonlinear, "zero N1, N2, N3 and all advection");
  cmd->add_option("--jobs", o.jobs, "concurrent sweep members");
  cmd->add_option("--out", o.out, "output directory (default: $GQG_OUT_DIR or ./out)");
  cmd->add_option("--seed", o.seed, "seed for random_seeded initial data");
  cmd->add_flag("--print-config", o.print_config, "echo the resolved configuration and exit");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

double to_double(const std::string& s, const char* what) {
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw ConfigError(std::string(what) + ": cannot parse '" + s + "'");
  return x;
}

RunConfig resolve(const Overrides& o) {
  RunConfig c;
  if (const char* env = std::getenv("GQG_OUT_DIR"); env && *env) c.outputs.out_dir = env;
  if (!o.config_path.empty()) {
    const std::string env_dir = c.outputs.out_dir;
    c = RunConfig::load(o.config_path);
    const json j = json::parse(std::ifstream(o.config_path), nullptr, false);
    if (!(j.is_object() && j.contains("outputs") && j["outputs"].contains("out_dir"))) c.outputs.out_dir = env_dir;
  }
  if (!o.eps.empty()) {
    c.eps.clear();
    for (const std::string& e : split(o.eps, ',')) c.eps.push_back(to_double(e, "--eps"));
  }
  if (!o.grid.empty()) {
    const auto parts = split(o.grid, ',');
    if (parts.size() != 3) throw ConfigError("--grid expects NX,NY,NZ");
    c.grid.nx = static_cast<int>(to_double(parts[0], "--grid"));
    c.grid.ny = static_cast<int>(to_double(parts[1], "--grid"));
    c.grid.nz = static_cast<int>(to_double(parts[2], "--grid"));
  }
  if (o.t_end) c.t_end = *o.t_end;
  c.integrator.t_end = c.t_end;
  if (o.dt) {
    if (!(*o.dt > 0.0)) throw ConfigError("--dt must be positive");
    c.integrator.dt = *o.dt;
  }
  if (!o.formulation.empty()) c.formulation = formulation_from_string(o.formulation);
  if (o.disable_nonlinear) c.integrator.tendency.nonlinear = false;
  if (o.jobs) c.jobs = *o.jobs;
  if (!o.out.empty()) c.outputs.out_dir = o.out;
  if (o.seed) c.initial.seed = *o.seed;
  c.validate();
  return c;
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

int cmd_simulate(const RunConfig& c) {
  const RunResult r = run_simulation(c);
  std::printf("completed %d steps of %s, dt = %.6g, sup E_frak = %.6g, max projection = %.3g\n", r.steps,
              to_string(c.formulation), r.dt, r.sup_E, r.max_projection);
  std::printf("outputs in %s\n", c.outputs.out_dir.c_str());
  return 0;
}

int cmd_sweep(const RunConfig& c) {
  const SweepReport rep = run_eps_sweep(c);
  rep.write(c.outputs.out_dir);
  std::fputs(rep.csv().c_str(), stdout);
  std::printf("uniform bound ratio max/min sup E_frak = %.6g (%s)\n", rep.uniform_bound_ratio,
              rep.uniform_bound_ratio <= 4.0 ? "within 4" : "exceeds 4");
  return 0;
}

int cmd_linear(const RunConfig& c) {
  const LinearReport rep = run_linear_validation(c);
  const std::filesystem::path dir = c.outputs.out_dir;
  write_json(dir / "linear_report.json", rep.json());
  std::cout << rep.json().dump(2) << '\n';
  return 0;
}

int cmd_qg(const RunConfig& c) {
  const WellPreparedReport rep = run_wellprepared_comparison(c);
  const std::filesystem::path dir = c.outputs.out_dir;
  rep.sweep.write(dir);
  write_json(dir / "wellprepared_report.json", rep.json());
  std::fputs(rep.sweep.csv().c_str(), stdout);
  std::printf("order of the Phi error in eps = %.4g, max fast error = %.3g, max|Phi_p| drift = %.3g\n", rep.order,
              rep.max_fast_error, rep.phi_p_max_drift);
  return 0;
}

int cmd_decompose(const std::string& path, const std::string& out_dir) {
  const Snapshot s = read_snapshot(path);
  const ChannelGrid grid = s.grid.make();
  const ChannelOps ops(grid);
  GPVState g;
  if (s.kind == "primitive") g = extract_gpv(ops, primitive_from_snapshot(grid, s));
  else if (s.kind == "gpv") g = gpv_from_snapshot(grid, s);
  else throw ConfigError("decompose expects a primitive or gpv snapshot, got '" + s.kind + "'");
  g.t = s.t;
  g.eps = s.eps;
  if (!(g.eps > 0.0)) throw ConfigError("decompose: snapshot eps must be positive to filter the fast variables");
  const std::filesystem::path dir = out_dir;
  write_snapshot(dir / "gpv.gqg", to_snapshot(grid, g));
  write_snapshot(dir / "fast.gqg", to_snapshot(grid, fast_filter(g), g.t, g.eps));
  const GPVReport r = validate_gpv(ops, g);
  std::printf("wrote %s and %s (mean residual %.3g, compatibility residual %.3g)\n", (dir / "gpv.gqg").c_str(),
              (dir / "fast.gqg").c_str(), r.mean_residual, r.compat_residual);
  return 0;
}

int cmd_inspect(const std::string& path) {
  const json h = read_snapshot_header(path);
  const json& g = h["grid"];
  std::printf("kind: %s\n", h.value("kind", "?").c_str());
  std::printf("grid: %d x %d x %d nodes (nz = %d), h = %.17g\n", g.value("nx", 0), g.value("ny", 0),
              g.value("nz", 0) + 1, g.value("nz", 0), g.value("h", 0.0));
  std::printf("t: %.17g\neps: %.17g\n", h.value("t", 0.0), h.value("eps", 0.0));
  for (const json& f : h["fields"])
    std::printf("field %-10s shape %s\n", f.value("name", "?").c_str(), f["shape"].dump().c_str());
  std::printf("payload: %zu bytes, crc32 %u\n", h.value("payload_bytes", std::size_t{0}),
              h.value("crc32", std::uint32_t{0}));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gqg: rotating Boussinesq channel and its quasi-geostrophic limit"};
  app.require_subcommand(1);
  Overrides o;
  std::string snap_path;

  auto* simulate = app.add_subcommand("simulate", "advance one formulation to t_end");
  auto* sweep = app.add_subcommand("sweep", "eps-sweep against the limit system");
  auto* linear = app.add_subcommand("linear-check", "linear regime against the closed-form solution");
  auto* qg = app.add_subcommand("qg-compare", "balanced data against classical QG");
  for (auto* c : {simulate, sweep, linear, qg}) add_common(c, o);
  auto* decompose = app.add_subcommand("decompose", "snapshot to GPV and fast-filtered fields");
  decompose->add_option("snapshot", snap_path, "primitive or gpv snapshot")->required();
  decompose->add_option("--out", o.out, "output directory");
  auto* inspect = app.add_subcommand("inspect", "print a snapshot header without loading arrays");
  inspect->add_option("snapshot", snap_path, "snapshot file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (inspect->parsed()) return cmd_inspect(snap_path);
    if (decompose->parsed()) {
      std::string dir = o.out;
      if (dir.empty()) {
        const char* env = std::getenv("GQG_OUT_DIR");
        dir = env && *env ? env : "out";
      }
      return cmd_decompose(snap_path, dir);
    }
    const RunConfig c = resolve(o);
    if (o.print_config) {
      std::cout << c.to_json().dump(2) << '\n';
      return 0;
    }
    if (simulate->parsed()) return cmd_simulate(c);
    if (sweep->parsed()) return cmd_sweep(c);
    if (linear->parsed()) return cmd_linear(c);
    if (qg->parsed()) return cmd_qg(c);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const DimensionError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const NumericalInstability& e) {
    std::fprintf(stderr, "numerical instability: %s\n", e.what());
    return 3;
  } catch (const ConstraintViolation& e) {
    std::fprintf(stderr, "numerical instability: %s (residuals %.3g, %.3g)\n", e.what(), e.first_residual(),
                 e.second_residual());
    return 3;
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 4;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 4;
  }
  return 2;
}
