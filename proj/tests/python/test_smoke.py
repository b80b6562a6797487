import math

import pytest

import pfdde

W0 = math.pi / 2


def test_wright_roots():
    m = pfdde.wright_model(0, 0.0, 1.0)
    roots = pfdde.find_roots(m, (-2.0, 1.0, -10.0, 10.0))
    near = [z for z, _ in roots if abs(abs(z.imag) - W0) < 1e-8 and abs(z.real) < 1e-8]
    assert len(near) == 2
    assert sum(k for _, k in roots) == pfdde.winding_number(m, (-2.0, 1.0, -10.0, 10.0))


def test_hopf_variants():
    m = pfdde.wright_model_autonomous(0)
    default = pfdde.hopf_coefficients(m, W0)
    paper = pfdde.hopf_coefficients(m, W0, variant="paper")
    assert default["l1"] == pytest.approx(pfdde.l1_autonomous_default(0), abs=1e-12)
    assert paper["l1"] == pytest.approx(-1.69697, abs=1e-5)


def test_forced_pipeline_matches_closed_form():
    m = pfdde.wright_model(0, 1.0, 0.77)
    rep = pfdde.hopf_coefficients(m, W0, variant="paper")
    assert rep["l1"] == pytest.approx(pfdde.l1_forced_plain(0, 1.0, 0.77), abs=1e-10)


def test_resonance_raises():
    m = pfdde.wright_model(0, 1.0, W0 / 2)
    with pytest.raises(pfdde.ResonantMode):
        pfdde.hopf_coefficients(m, W0)
    assert pfdde.resonance_scan(m, 0.0) == [-2, 2]


def test_fold():
    m = pfdde.fold_model(1.0, {0: 1.0, 1: -0.5j, -1: 0.5j}, period=2 * math.pi)
    assert pfdde.fold_coefficient(m)["b"] == pytest.approx(0.5, abs=1e-12)
    with pytest.raises(pfdde.ValidationError):
        pfdde.fold_model(-1.0, {0: 1.0})


def test_model_round_trip():
    m = pfdde.wright_model(1, 1.0, 0.4)
    text = m.to_json()
    assert pfdde.parse_model(text).to_json() == text


def test_simulate_decays():
    m = pfdde.wright_model_at(-1.0, {1: 0.5, -1: 0.5}, period=2 * math.pi)
    out = pfdde.simulate(m, 400.0, history=0.5, transient=200.0)
    assert out["verdict"] == "decayed"
    assert len(out["t"]) == len(out["x"])


def test_j_pole():
    with pytest.raises(pfdde.PoleError):
        pfdde.J(0, W0)
    assert pfdde.J(0, 2 * W0) == pytest.approx(complex(4, -2) / 5, abs=1e-12)
