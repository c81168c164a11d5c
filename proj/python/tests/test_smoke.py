import math
import os
from pathlib import Path

import numpy as np
import pytest

import shinf

DATA = Path(os.environ.get("SHINF_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))


def neutral1(t1=1.0, t2=2.0):
    E = np.diag([1.0, 0.0])
    A0 = np.array([[0.0, 1.0], [-1.0, -1.0]])
    A1 = np.zeros((2, 2))
    A1[1, 1] = 1.0 / 16
    A2 = np.zeros((2, 2))
    A2[1, 1] = -0.5
    return shinf.System(E, [A0, A1, A2], np.array([[0.0], [1.0]]), np.array([[2.0, 1.0]]), [t1, t2])


def test_neutral_norm_and_certificate():
    cert = shinf.strong_hinf(neutral1())
    assert cert.branch == "frequency"
    assert cert.value == pytest.approx(2.385464374423, rel=1e-9)
    assert cert.to_dict()["value"] == cert.value
    value, theta = shinf.strong_norm_Ta(neutral1())
    assert value == pytest.approx(16 / 7, abs=1e-10)
    assert len(theta) == 2


def test_sweep_shape_and_transfer():
    sys = neutral1(0.99, 2.0)
    omegas = np.logspace(-2, 2, 50)
    s = shinf.sweep(sys, omegas, sigmas=1)
    assert s.shape == (50, 1)
    assert s[10, 0] == pytest.approx(abs(shinf.transfer(sys, 1j * omegas[10])[0, 0]))


def test_system_round_trip_and_file():
    sys = neutral1()
    again = shinf.System.load(sys.to_dict())
    assert np.array_equal(again.A[1], sys.A[1])
    assert shinf.System.load(str(DATA / "neutral1_tau0.99.json")).delays == [0.99, 2.0]


def test_exceptions():
    with pytest.raises(shinf.CausalityViolation):
        shinf.strong_hinf(shinf.System.load(str(DATA / "noncausal.json")))
    loop = shinf.Interconnection.load(str(DATA / "bench_h1.0.json"))
    with pytest.raises(shinf.StrongStabilityViolation):
        shinf.strong_hinf(loop.closed_loop(loop.initial[0]))
    with pytest.raises(shinf.DimensionError):
        shinf.System(np.eye(2), [np.eye(3)], np.ones((2, 1)), np.ones((1, 2)), [])
    assert shinf.check(shinf.System.load(str(DATA / "noncausal.json")))["causal"] is False


def test_interconnection_gradient_and_optimize():
    loop = shinf.Interconnection.load(str(DATA / "bench_h0.5.json"))
    assert loop.num_params == 2
    p = loop.initial[0]
    value, grad, smooth = loop.gradient(p)
    assert value == pytest.approx(0.4100884472, abs=1e-8)
    report = loop.grad_check(p)
    assert report["max_rel_error"] < 1e-5
    assert np.allclose(grad, report["gradient"])
    res = loop.optimize(starts=1, max_iter=5, initial=[p])
    assert res["value"] <= value + 1e-12
    assert math.isfinite(res["value"])
