import math

import numpy as np
import pytest

import gqg


def small(**over):
    cfg = {
        "grid": {"nx": 8, "ny": 8, "nz": 8},
        "eps": 0.1,
        "t_end": 0.05,
        "initial_data": {"kind": "random_seeded", "seed": 3, "bandwidth": 2, "amplitude": 0.01},
    }
    cfg.update(over)
    return cfg


def test_grid_nodes_are_chebyshev_lobatto_with_cc_weights():
    x, y, z, w = gqg.grid_nodes(8, 6, 10, 2.0)
    assert x.shape == (8,) and y.shape == (6,) and z.shape == (11,)
    assert x[1] == pytest.approx(1 / 8)
    assert z[0] == 0.0 and z[-1] == pytest.approx(2.0)
    k = np.arange(11)
    assert np.allclose(z, (2.0 / 2) * (1 - np.cos(np.pi * k / 10)))
    # CC quadrature integrates z^3 over [0, 2] exactly
    assert np.dot(w, z**3) == pytest.approx(4.0, rel=1e-13)


def test_resolve_config_fills_defaults_and_rejects_unknown_keys():
    c = gqg.resolve_config(small())
    assert c["grid"]["nx"] == 8 and c["formulation"] == "gpv"
    assert gqg.default_config()["outputs"]["out_dir"] == "out"
    with pytest.raises(gqg.ConfigError):
        gqg.resolve_config({"grdi": {}})
    with pytest.raises(gqg.GqgError):
        gqg.resolve_config({"eps": -1.0})


@pytest.mark.parametrize("formulation", ["gpv", "primitive", "limit"])
def test_simulate_returns_finite_diagnostics(formulation):
    r = gqg.simulate(small(formulation=formulation))
    d = r["diagnostics"]
    assert r["steps"] >= 1
    assert d["t"][0] == 0.0 and d["t"][-1] == pytest.approx(0.05)
    assert all(math.isfinite(v) for v in d["E_frak"])
    assert r["sup_E"] >= d["E_frak"][0]


def test_simulate_is_deterministic():
    a = gqg.simulate(small())
    b = gqg.simulate(small())
    assert np.array_equal(a["diagnostics"]["E_frak"], b["diagnostics"]["E_frak"])


def test_snapshot_files_round_trip_through_numpy(tmp_path):
    cfg = small(outputs={"out_dir": str(tmp_path)})
    r = gqg.simulate(cfg, write_files=True)
    final = tmp_path / ("snapshot_%06d.gqg" % r["steps"])
    hdr = gqg.read_snapshot_header(final)
    assert hdr["format"] == "gqg-snapshot" and hdr["kind"] == "gpv"
    snap = gqg.read_snapshot(str(final))
    assert snap["t"] == pytest.approx(0.05)
    assert snap["fields"]["Phi"].shape == (8, 8, 9)
    assert snap["fields"]["H0"].shape[2] == 1
    assert all(np.isfinite(a).all() for a in snap["fields"].values())


def test_corrupted_snapshot_raises_io_error(tmp_path):
    gqg.simulate(small(t_end=0.0, outputs={"out_dir": str(tmp_path)}), write_files=True)
    path = tmp_path / "snapshot_000000.gqg"
    raw = bytearray(path.read_bytes())
    raw[-3] ^= 0x10
    path.write_bytes(bytes(raw))
    with pytest.raises(gqg.IoError):
        gqg.read_snapshot(str(path))
    with pytest.raises(gqg.IoError):
        gqg.read_snapshot(str(tmp_path / "missing.gqg"))


def test_sweep_rejects_too_few_eps():
    with pytest.raises(gqg.ConfigError):
        gqg.sweep(small(eps=[0.1, 0.05]))
