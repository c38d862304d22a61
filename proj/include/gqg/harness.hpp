#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gqg/gpv.hpp"
#include "gqg/integrators.hpp"
#include "gqg/states.hpp"

namespace gqg {

enum class Formulation { gpv, primitive, limit };
const char* to_string(Formulation f);
Formulation formulation_from_string(const std::string& s);

struct GridSpec {
  int nx = 32, ny = 32;
  int nz = 32;  // polynomial degree: nz + 1 vertical nodes
  double h = 1.0;
  bool dealias = true;

  ChannelGrid make() const { return ChannelGrid(nx, ny, nz, h, dealias); }
};

// One term a * X(2 pi kx x) * Y(2 pi ky y) * V(m pi z / h) of a balanced
// stream function, each factor "sin" or "cos".
struct StreamMode {
  double amplitude = 1.0;
  int kx = 1, ky = 1, m = 1;
  std::string x = "sin", y = "sin", z = "sin";
};

struct InitialDataSpec {
  enum class Kind { random_seeded, balanced, single_mode, from_snapshot };
  Kind kind = Kind::random_seeded;
  std::uint64_t seed = 1;
  int bandwidth = 2;
  // random_seeded: target max over nodes of |v|, |w|, |theta|; single_mode and
  // balanced: multiplier of the unit-size pattern.
  double amplitude = 0.01;
  std::vector<StreamMode> modes{StreamMode{}};  // balanced
  int k1 = 1, k2 = 0, m = 1;                    // single_mode
  std::string path;                             // from_snapshot
};

struct OutputSpec {
  int diagnostics_every = 1;
  int snapshot_every = 0;  // 0: initial and final only
  std::string out_dir = "out";
};

struct RunConfig {
  GridSpec grid;
  std::vector<double> eps{0.1};
  double t_end = 1.0;
  Formulation formulation = Formulation::gpv;
  IntegratorConfig integrator;
  InitialDataSpec initial;
  OutputSpec outputs;
  int sweep_samples = 10;  // comparison times T/samples, 2T/samples, ..., T
  int jobs = 1;

  void validate() const;
  nlohmann::json to_json() const;
  // Unknown keys are rejected so that typos do not silently fall back to defaults.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::filesystem::path& path);
};

// Initial data ----------------------------------------------------------------

PrimitiveState generate_initial(const ChannelOps& ops, const InitialDataSpec& spec, double eps);
LimitState initial_limit_state(const ChannelOps& ops, const PrimitiveState& p);

// Snapshots -------------------------------------------------------------------

struct NamedArray {
  std::string name;
  std::array<int, 3> shape{};  // row-major, last index fastest
  std::vector<double> data;
};

struct Snapshot {
  std::string kind;  // "primitive", "gpv", "limit", "fast"
  GridSpec grid;
  double t = 0.0;
  double eps = 0.0;
  std::vector<NamedArray> fields;

  const NamedArray& field(const std::string& name) const;
};

inline constexpr const char* kSnapshotFormat = "gqg-snapshot";
inline constexpr int kSnapshotSchema = 1;

Snapshot to_snapshot(const ChannelGrid& g, const PrimitiveState& p);
Snapshot to_snapshot(const ChannelGrid& g, const GPVState& s);
Snapshot to_snapshot(const ChannelGrid& g, const LimitState& L);
Snapshot to_snapshot(const ChannelGrid& g, const FastPair& f, double t, double eps);
PrimitiveState primitive_from_snapshot(const ChannelGrid& g, const Snapshot& s);
GPVState gpv_from_snapshot(const ChannelGrid& g, const Snapshot& s);
LimitState limit_from_snapshot(const ChannelGrid& g, const Snapshot& s);

// One JSON header line, then the float64 little-endian payload. The header
// carries the CRC32 of the payload.
void write_snapshot(const std::filesystem::path& path, const Snapshot& s);
Snapshot read_snapshot(const std::filesystem::path& path);
// Header only; the payload is not read.
nlohmann::json read_snapshot_header(const std::filesystem::path& path);

// Runs --------------------------------------------------------------------------

struct RunResult {
  std::vector<DiagnosticsRecord> diagnostics;
  int steps = 0;
  double dt = 0.0;
  double E0 = 0.0;
  double sup_E = 0.0;
  double h0_sup_initial = 0.0;  // trig sup of the bottom trace
  double h0_sup_max = 0.0;
  double max_projection = 0.0;  // gpv: constraint projection; primitive: divergence cleaned
  double max_div_residual = 0.0;
  double max_bc_residual = 0.0;
  std::optional<PrimitiveState> primitive;  // final state, reconstructed for gpv
  std::optional<GPVState> gpv;
  std::optional<LimitState> limit;
};

// Fixed dt for a run: cfg.dt if positive, else 0.8 stable_dt at t = 0; then
// shrunk so that an integer number of steps reaches t_end exactly.
double choose_dt(const ChannelOps& ops, const PrimitiveState& p, const RunConfig& cfg, double eps);

DiagnosticsRecord diagnostics(const ChannelOps& ops, const PrimitiveState& p);
DiagnosticsRecord diagnostics(const ChannelOps& ops, const GPVState& g);
DiagnosticsRecord diagnostics(const ChannelOps& ops, const LimitState& L);

// Advances config.formulation at config.eps[0]. With write_files the
// diagnostics CSV, projection log, snapshots and summary.json land in
// outputs.out_dir. Blow-up (E_frak above 10x its initial value) throws
// NumericalInstability after writing the summary with the reason.
RunResult run_simulation(const RunConfig& config, bool write_files = true);

struct SweepRow {
  double eps = 0.0;
  double err_phi_H1 = 0.0, err_psi_H1 = 0.0, err_z_H2 = 0.0, err_theta_H2 = 0.0, err_v_H2 = 0.0;
  double sup_E_frak = 0.0;
  // sup over the sampled comparison times
  double sup_err_phi_H1 = 0.0, sup_err_psi_H1 = 0.0, sup_err_z_H2 = 0.0;
  double dt = 0.0;
};

struct SweepReport {
  std::vector<SweepRow> rows;  // eps descending
  nlohmann::json metadata;
  double uniform_bound_ratio = 0.0;  // max_eps sup E / min_eps sup E

  std::string csv() const;
  nlohmann::json json() const;
  nlohmann::json plot_manifest() const;
  void write(const std::filesystem::path& dir) const;
};

SweepReport run_eps_sweep(const RunConfig& config);

struct LinearReport {
  double phi_drift = 0.0, h_drift = 0.0;          // max |X(t) - X(0)| over the run
  double psi_plus_drift = 0.0, z_plus_drift = 0.0;
  double state_error = 0.0;  // reconstructed (v, w, theta) vs the closed form, max abs
  double w_error = 0.0;
  int steps = 0;
  double dt = 0.0;

  nlohmann::json json() const;
};

LinearReport run_linear_validation(const RunConfig& config);

struct WellPreparedReport {
  SweepReport sweep;
  double order = 0.0;          // log-log slope of err_phi_H1 against eps
  double max_fast_error = 0.0;  // largest fast column over the sweep
  double phi_p_max_drift = 0.0;  // relative change of max |Phi_p| along the limit run

  nlohmann::json json() const;
};

WellPreparedReport run_wellprepared_comparison(const RunConfig& config);

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace gqg
