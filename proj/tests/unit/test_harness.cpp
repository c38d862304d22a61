#include <doctest.h>

#include <cstring>
#include <fstream>
#include <sstream>

#include "gqg/harness.hpp"
#include "support/analytic.hpp"

using namespace testing_support;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("gqg_unit_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

RunConfig small_config() {
  RunConfig c;
  c.grid = {16, 16, 16, 1.0, true};
  c.eps = {0.1};
  c.t_end = 0.1;
  c.integrator.t_end = 0.1;
  c.initial.amplitude = 0.01;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class T, class Tag>
bool bit_equal(const Nodal<T, Tag>& a, const Nodal<T, Tag>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(T)) == 0;
}
template <class F>
bool bit_equal(const Vec2<F>& a, const Vec2<F>& b) {
  return bit_equal(a.x1, b.x1) && bit_equal(a.x2, b.x2);
}

}  // namespace

TEST_CASE("run config survives a JSON round trip and rejects unknown keys") {
  RunConfig c = small_config();
  c.eps = {0.2, 0.1, 0.05};
  c.integrator.dt = 0.01;
  c.initial.kind = InitialDataSpec::Kind::balanced;
  c.initial.modes = {StreamMode{0.5, 1, 2, 1, "cos", "sin", "sin"}};
  c.formulation = Formulation::primitive;
  const RunConfig d = RunConfig::from_json(c.to_json());
  CHECK(d.to_json() == c.to_json());
  CHECK(d.eps == c.eps);
  CHECK(d.integrator.dt == 0.01);

  nlohmann::json j = c.to_json();
  j["integrator"]["dt"] = "auto";
  CHECK(RunConfig::from_json(j).integrator.dt == 0.0);
  j["integrator"]["cfll"] = 0.3;
  CHECK_THROWS_AS(RunConfig::from_json(j), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json(nlohmann::json{{"formulation", "spectral"}}), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json(nlohmann::json{{"eps", "small"}}), ConfigError);
}

TEST_CASE("run config validation") {
  RunConfig c = small_config();
  CHECK_NOTHROW(c.validate());
  c.initial.bandwidth = 6;  // 3 * 6 > 16
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.eps = {0.1, -0.1};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.grid.nx = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.initial.kind = InitialDataSpec::Kind::single_mode;
  c.initial.k1 = c.initial.k2 = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("balanced initial data carries no fast GPV content") {
  for (double h : {1.0, 0.8}) {
    ChannelGrid g(16, 16, 24, h);
    ChannelOps ops(g);
    InitialDataSpec s;
    s.kind = InitialDataSpec::Kind::balanced;
    s.amplitude = 1.0;  // p0 = sin(2 pi x) sin(2 pi y) sin(pi z / h)
    const PrimitiveState p = generate_initial(ops, s, 0.1);
    CHECK(p.w.max_abs() == 0.0);
    CHECK(p.v.max_abs() > 1.0);
    const GPVState q = extract_gpv(ops, p, 1e-8);
    CHECK(q.Psi.max_abs() < 1e-10);
    CHECK(q.Z.max_abs() < 1e-12);
  }
}

TEST_CASE("generated initial data is deterministic, solenoidal and scaled") {
  ChannelGrid g(16, 16, 16);
  ChannelOps ops(g);
  InitialDataSpec s;
  s.seed = 42;
  s.amplitude = 0.3;
  const PrimitiveState a = generate_initial(ops, s, 0.1), b = generate_initial(ops, s, 0.1);
  CHECK(bit_equal(a.v, b.v));
  CHECK(bit_equal(a.w, b.w));
  CHECK(bit_equal(a.theta, b.theta));
  CHECK(std::max({a.v.max_abs(), a.w.max_abs(), a.theta.max_abs()}) == doctest::Approx(0.3).epsilon(1e-14));
  const PrimitiveReport r = validate_primitive(ops, a);
  CHECK(r.div_residual < 1e-12);
  CHECK(r.bc_residual == 0.0);

  s.seed = 43;
  CHECK_FALSE(bit_equal(generate_initial(ops, s, 0.1).theta, a.theta));

  s.amplitude = 0.0;
  const PrimitiveState z = generate_initial(ops, s, 0.1);
  CHECK(z.v.max_abs() == 0.0);
  CHECK(z.w.max_abs() == 0.0);
  CHECK(z.theta.max_abs() == 0.0);

  s.bandwidth = 6;
  CHECK_THROWS_AS(generate_initial(ops, s, 0.1), ConfigError);

  InitialDataSpec m;
  m.kind = InitialDataSpec::Kind::single_mode;
  m.k1 = 1;
  m.k2 = 1;
  m.m = 1;
  m.amplitude = 0.5;
  const PrimitiveState sm = generate_initial(ops, m, 0.1);
  CHECK(validate_primitive(ops, sm).div_residual < 1e-10);
  const ScalarField w = sample(g, [](double x, double y, double z) { return 0.5 * std::cos(2 * pi * (x + y)) * std::sin(pi * z); });
  CHECK(max_diff(sm.w, w) < 1e-15);
}

TEST_CASE("snapshots round-trip bit for bit for every state kind") {
  ChannelGrid g(8, 8, 8, 1.5);
  ChannelOps ops(g);
  FieldGen gen(9);
  const fs::path dir = scratch_dir("snap");

  PrimitiveState p = gen.primitive(ops, 2, 3, 0.7);
  p.t = 0.1 + 0.2;  // not exactly representable in a short decimal
  p.eps = 1.0 / 3.0;
  write_snapshot(dir / "p.gqg", to_snapshot(g, p));
  const PrimitiveState p2 = primitive_from_snapshot(g, read_snapshot(dir / "p.gqg"));
  CHECK(bit_equal(p.v, p2.v));
  CHECK(bit_equal(p.w, p2.w));
  CHECK(bit_equal(p.theta, p2.theta));
  CHECK(p2.t == p.t);
  CHECK(p2.eps == p.eps);

  GPVState q = extract_gpv(ops, p);
  write_snapshot(dir / "g.gqg", to_snapshot(g, q));
  const GPVState q2 = gpv_from_snapshot(g, read_snapshot(dir / "g.gqg"));
  CHECK(bit_equal(q.Phi, q2.Phi));
  CHECK(bit_equal(q.Psi, q2.Psi));
  CHECK(bit_equal(q.H0, q2.H0));
  CHECK(bit_equal(q.Hh, q2.Hh));
  CHECK(bit_equal(q.Z, q2.Z));

  const LimitState L = project_to_limit(q);
  write_snapshot(dir / "l.gqg", to_snapshot(g, L));
  const LimitState L2 = limit_from_snapshot(g, read_snapshot(dir / "l.gqg"));
  CHECK(bit_equal(L.Phi_p, L2.Phi_p));
  CHECK(bit_equal(L.psi_p, L2.psi_p));
  CHECK(bit_equal(L.z_p, L2.z_p));

  // writing the read-back state reproduces the file byte for byte
  write_snapshot(dir / "p2.gqg", to_snapshot(g, p2));
  CHECK(slurp(dir / "p.gqg") == slurp(dir / "p2.gqg"));

  const nlohmann::json h = read_snapshot_header(dir / "g.gqg");
  CHECK(h["kind"] == "gpv");
  CHECK(h["grid"]["nz"] == 8);
  CHECK(h["element_type"] == "float64 little-endian");

  ChannelGrid other(8, 8, 10);
  CHECK_THROWS_AS(primitive_from_snapshot(other, read_snapshot(dir / "p.gqg")), DimensionError);
  CHECK_THROWS_AS(gpv_from_snapshot(g, read_snapshot(dir / "p.gqg")), IoError);
}

TEST_CASE("corrupted and truncated snapshots are rejected") {
  ChannelGrid g(8, 8, 8);
  ChannelOps ops(g);
  FieldGen gen(4);
  const fs::path dir = scratch_dir("corrupt");
  write_snapshot(dir / "a.gqg", to_snapshot(g, gen.primitive(ops, 2, 2)));
  const std::string bytes = slurp(dir / "a.gqg");

  std::string flipped = bytes;
  flipped[flipped.size() - 100] ^= 0x01;
  std::ofstream(dir / "b.gqg", std::ios::binary) << flipped;
  CHECK_THROWS_WITH_AS(read_snapshot(dir / "b.gqg"), doctest::Contains("checksum"), IoError);

  std::ofstream(dir / "c.gqg", std::ios::binary) << bytes.substr(0, bytes.size() - 8);
  CHECK_THROWS_WITH_AS(read_snapshot(dir / "c.gqg"), doctest::Contains("checksum"), IoError);
  // the header alone is still readable
  CHECK(read_snapshot_header(dir / "c.gqg")["kind"] == "primitive");

  std::string schema = bytes;
  const auto pos = schema.find("\"schema_version\":1");
  REQUIRE(pos != std::string::npos);
  schema[pos + std::strlen("\"schema_version\":")] = '7';
  std::ofstream(dir / "d.gqg", std::ios::binary) << schema;
  CHECK_THROWS_AS(read_snapshot(dir / "d.gqg"), IoError);

  CHECK_THROWS_AS(read_snapshot(dir / "missing.gqg"), IoError);
}

TEST_CASE("t_end = 0 writes the initial snapshot only") {
  RunConfig c = small_config();
  c.t_end = 0.0;
  c.integrator.t_end = 0.0;
  c.outputs.out_dir = scratch_dir("t0").string();
  const RunResult r = run_simulation(c);
  CHECK(r.steps == 0);
  CHECK(r.diagnostics.size() == 1);
  int snaps = 0;
  for (const auto& e : fs::directory_iterator(c.outputs.out_dir))
    if (e.path().extension() == ".gqg") ++snaps;
  CHECK(snaps == 1);
  CHECK(fs::exists(fs::path(c.outputs.out_dir) / "snapshot_000000.gqg"));
}

TEST_CASE("diagnostics csv parses back to the recorded values") {
  RunConfig c = small_config();
  c.outputs.out_dir = scratch_dir("diag").string();
  const RunResult r = run_simulation(c);
  std::ifstream in(fs::path(c.outputs.out_dir) / "diagnostics.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == DiagnosticsRecord::csv_header());
  std::size_t n = 0;
  while (std::getline(in, line)) {
    REQUIRE(n < r.diagnostics.size());
    const DiagnosticsRecord d = DiagnosticsRecord::parse_csv_row(line), &e = r.diagnostics[n++];
    CHECK(d.t == e.t);
    CHECK(d.E_frak == e.E_frak);
    CHECK(d.l2_energy == e.l2_energy);
    CHECK(d.mean_residual == e.mean_residual);
  }
  CHECK(n == r.diagnostics.size());
  CHECK(r.primitive.has_value());
  CHECK(r.primitive->t == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("all three formulations run from one config") {
  RunConfig c = small_config();
  c.t_end = 0.05;
  c.integrator.t_end = 0.05;
  for (Formulation f : {Formulation::gpv, Formulation::primitive, Formulation::limit}) {
    c.formulation = f;
    const RunResult r = run_simulation(c, false);
    CHECK(r.steps >= 1);
    CHECK(r.sup_E > 0.0);
    CHECK(r.steps * r.dt == doctest::Approx(0.05).epsilon(1e-14));
  }
}

TEST_CASE("sweep preconditions and determinism") {
  RunConfig c = small_config();
  c.eps = {0.1};
  CHECK_THROWS_AS(run_eps_sweep(c), ConfigError);
  c.eps = {0.05, 0.2, 0.1};
  c.t_end = 0.1;
  c.sweep_samples = 2;
  const SweepReport a = run_eps_sweep(c);
  REQUIRE(a.rows.size() == 3);
  CHECK(a.rows[0].eps == 0.2);
  CHECK(a.rows[1].eps == 0.1);
  CHECK(a.rows[2].eps == 0.05);
  for (const SweepRow& r : a.rows) CHECK(std::isfinite(r.sup_E_frak));
  c.jobs = 3;
  const SweepReport b = run_eps_sweep(c);
  CHECK(a.csv() == b.csv());
  CHECK(a.json().dump() == b.json().dump());
  CHECK(a.metadata["seed"] == 1);
  CHECK(a.plot_manifest()["x"]["column"] == "eps");
}

TEST_CASE("well-prepared comparison needs balanced data and vanishes on zero data") {
  RunConfig c = small_config();
  c.eps = {0.2, 0.1, 0.05};
  c.sweep_samples = 1;
  CHECK_THROWS_AS(run_wellprepared_comparison(c), ConfigError);
  c.initial.kind = InitialDataSpec::Kind::balanced;
  c.initial.amplitude = 0.0;
  const WellPreparedReport r = run_wellprepared_comparison(c);
  for (const SweepRow& row : r.sweep.rows) {
    CHECK(row.err_phi_H1 == 0.0);
    CHECK(row.err_psi_H1 == 0.0);
    CHECK(row.err_z_H2 == 0.0);
  }
  CHECK(r.max_fast_error == 0.0);
}

TEST_CASE("linear validation on a small grid") {
  RunConfig c = small_config();
  c.eps = {0.05};
  c.t_end = 0.25;
  c.integrator.t_end = 0.25;
  c.integrator.dt = 0.05 / 4;
  c.initial.amplitude = 1.0;
  const LinearReport r = run_linear_validation(c);
  CHECK(r.steps == 20);
  CHECK(r.phi_drift <= 1e-12);
  CHECK(r.h_drift <= 1e-12);
  CHECK(r.psi_plus_drift <= 1e-12);
  CHECK(r.z_plus_drift <= 1e-12);
  CHECK(r.state_error <= 1e-10);
  CHECK(r.w_error <= 1e-10);
}

TEST_CASE("log-log slope of a power law") {
  const std::vector<double> x{0.2, 0.1, 0.05, 0.025};
  std::vector<double> y;
  for (double e : x) y.push_back(3.0 * std::pow(e, 1.5));
  CHECK(loglog_slope(x, y) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK_THROWS_AS(loglog_slope({1.0}, {1.0}), ConfigError);
  CHECK_THROWS_AS(loglog_slope({1.0, 2.0}, {0.0, 1.0}), ConfigError);
}
