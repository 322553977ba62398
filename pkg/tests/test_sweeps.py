import io
import math
import random

import numpy as np
import pytest

from geophase.params import ValidationError
from geophase.sweeps import (
    PRESETS,
    Axis,
    SweepSpec,
    _map,
    preset_csv,
    preset_sidecar,
    run_preset,
    sweep_cells,
    sweep_csv,
    worker_count,
)


def _rows(text):
    lines = text.rstrip("\n").split("\n")
    return lines[0], [line.split(",") for line in lines[1:]]


def test_axis_values():
    np.testing.assert_allclose(Axis("theta0", 0, math.pi, 5).values(), np.linspace(0, math.pi, 5))


@pytest.mark.parametrize(
    "a1, a2, quantity",
    [
        (Axis("theta0", 0, 1, 3), Axis("theta0", 0, 1, 3), "gp_entangled"),
        (Axis("colour", 0, 1, 3), Axis("theta0", 0, 1, 3), "gp_entangled"),
        (Axis("lambda0", 0, 1.5, 3), Axis("theta0", 0, 1, 3), "gp_entangled"),
        (Axis("lambda0", 0, 1, 1), Axis("theta0", 0, 1, 3), "gp_entangled"),
        (Axis("lambda0", 0, 1, 3), Axis("theta0", 0, 1, 3), "purity"),
    ],
)
def test_spec_validation(a1, a2, quantity):
    with pytest.raises(ValidationError):
        SweepSpec(a1, a2, {}, quantity)


def test_sweep_csv_layout():
    plan = SweepSpec(Axis("concurrence", 0.0, 1.0, 3), Axis("theta0", 0.0, math.pi, 4), {"regime": "isolated"})
    header, rows = _rows(sweep_csv(plan))
    assert header == "concurrence,theta0,phase_over_pi"
    assert len(rows) == 12
    assert [float(r[0]) for r in rows[:4]] == [0.0] * 4  # row-major: axis2 varies fastest
    assert float(rows[1][1]) == pytest.approx(math.pi / 3)
    # concurrence 1 is the MES: degenerate assignment pi/2
    assert {float(r[2]) for r in rows[8:]} == {0.5}


def test_failed_cell_left_empty():
    plan = SweepSpec(Axis("lambda0", 0.5 + 1e-11, 0.3, 2), Axis("theta0", 1.0, 2.0, 2), {"regime": "isolated"})
    err = io.StringIO()
    _, rows = _rows(sweep_csv(plan, stderr=err))
    assert rows[0][2] == "" and rows[1][2] == ""
    assert rows[2][2] != "" and rows[3][2] != ""
    assert "DegenerateEvolution" in err.getvalue()


def test_product_sweep_ignores_entangled_keys():
    plan = SweepSpec(Axis("q", 0.0, 1.0, 3), Axis("theta0", 0.0, math.pi, 3), {"lambda0": 0.2}, "gp_product")
    cells = sweep_cells(plan)
    for _, theta, ph in cells:
        assert ph == pytest.approx((2 * math.pi * math.sin(theta / 2) ** 2) % (2 * math.pi), abs=1e-9)


def test_cells_order_independent():
    plan = SweepSpec(Axis("concurrence", 0.1, 0.9, 4), Axis("theta0", 0.2, 3.0, 4), {"gamma0": 0.02, "chi": 0.1, "regime": "ohmic"})
    jobs = [({**plan.fixed, "concurrence": float(a), "theta0": float(b)}, 512, True) for a in plan.axis1.values() for b in plan.axis2.values()]
    ordered = _map(jobs, workers=1)
    idx = list(range(len(jobs)))
    random.Random(7).shuffle(idx)
    shuffled = _map([jobs[i] for i in idx], workers=1)
    restored = [None] * len(jobs)
    for i, r in zip(idx, shuffled):
        restored[i] = r
    assert restored == ordered


def test_process_pool_matches_serial():
    plan = SweepSpec(Axis("concurrence", 0.1, 0.9, 3), Axis("theta0", 0.2, 3.0, 3), {"chi": 0.1})
    assert sweep_csv(plan, workers=2) == sweep_csv(plan, workers=1)


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("GEOPHASE_THREADS", "1")
    assert worker_count() == 1
    monkeypatch.setenv("GEOPHASE_THREADS", "0")
    assert worker_count() == 1
    monkeypatch.setenv("GEOPHASE_THREADS", "many")
    assert worker_count() >= 1


def test_fig1_mes_row_constant():
    header, rows = _rows(preset_csv("fig1"))
    mes = [float(r[2]) for r in rows if float(r[0]) == 1.0]
    assert len(mes) == 64 and set(mes) == {0.5}


def test_fig8_surface_independent_of_q():
    _, rows = _rows(preset_csv("fig8"))
    for q, theta, ph in rows:
        expected = (2 * math.sin(float(theta) / 2) ** 2) % 2
        assert abs(((float(ph) - expected + 1) % 2) - 1) < 1e-9


def test_fig2_curves():
    text = preset_csv("fig2")
    labels = {line.split(",")[0] for line in text.splitlines()[1:]}
    assert labels == {"C=1.0", "C=0.95", "C=0.8", "C=0.43"}
    assert text.splitlines()[0] == "curve,t,x,y,z,purity"
    for c in PRESETS["fig2"].curves:
        assert c.mapping["gamma0"] == 0.0 and c.mapping["chi"] == 0.0


def test_fig6_and_fig11_parameters():
    for c in PRESETS["fig6"].curves:
        assert (c.mapping["cutoff"], c.mapping["gamma0"], c.mapping["chi"], c.mapping["theta0"]) == (20.0, 0.02, 0.1, math.pi / 5)
    assert sorted(c.mapping["concurrence"] for c in PRESETS["fig6"].curves) == [0.43, 0.71, 0.91]
    combos = {(c.mapping["q"], c.mapping["chi"]) for c in PRESETS["fig11"].curves}
    assert combos == {(0.4, 0.0), (0.4, 0.1), (0.01, 0.0), (0.01, 0.1)}
    assert all(c.mapping["theta0"] == math.pi / 3 for c in PRESETS["fig11"].curves)
    assert PRESETS["fig11"].param.name == "gamma0"


def test_run_preset_files_and_determinism(tmp_path):
    paths = run_preset("fig5", tmp_path)
    assert [p.name for p in paths] == ["fig5.csv", "fig5.params.txt"]
    first = paths[0].read_bytes()
    assert b"\r" not in first
    run_preset("fig5", tmp_path)
    assert paths[0].read_bytes() == first


def test_sidecar_records_branch():
    side = preset_sidecar("fig3")
    assert "concurrence_branch" in side and "chi = 0.1" in side
    assert "concurrence_branch" not in preset_sidecar("fig8")


def test_unknown_preset():
    with pytest.raises(ValidationError):
        preset_csv("fig12")


def test_csv_reals_round_trip():
    _, rows = _rows(preset_csv("fig11"))
    for r in rows:
        if r[2]:
            assert float(r[3]) == pytest.approx(float(r[2]) / math.pi, rel=1e-15)
