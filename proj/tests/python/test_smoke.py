import math

import numpy as np
import pytest

import qubus


def test_closed_forms():
    p = qubus.LinkParams()
    assert math.isclose(p.eta, math.exp(-3.0), rel_tol=1e-15)
    assert qubus.p_g_exact(p) == pytest.approx(5e-5, rel=0.02)
    assert qubus.link_fidelity(p) >= 0.9995
    assert qubus.final_fidelity(0.9995, 1200.0, 75.0) == pytest.approx(0.99203, abs=1e-5)
    c = qubus.ChainParams()
    assert qubus.t_tot(c) == pytest.approx(8.0, rel=0.01)
    assert qubus.memory_space(c) == 60


def test_link_simulator():
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 1.0
    p = qubus.LinkParams()
    p.alpha = 30.0
    sim = qubus.LinkSimulator(rho, p)
    assert sum(sim.port_probabilities()) == pytest.approx(1.0)
    a = sim.run(20000, 3)
    b = sim.run(20000, 3)
    assert a == b
    assert a["attempts"] == 20000


def test_circuit_and_commands():
    ok, checks = qubus.verify_circuit()
    assert ok and checks
    out = qubus.run_command("table")
    assert out["exit_code"] == 0
    assert out["csv"].startswith("f_hz,")
    with pytest.raises(ValueError):
        qubus.run_command("table", "warp_factor = 9\n")


def test_mc_distribute():
    c = qubus.ChainParams()
    c.f_hz = 1e6
    r = qubus.mc_distribute(c, 1, 20)
    assert r["mean_time_s"] >= c.L_km / c.c_km_s
    assert r == qubus.mc_distribute(c, 1, 20)
