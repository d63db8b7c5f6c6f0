"""Smoke tests for the python module built from the C++ core."""

import math

import pytest

import ccgeod


def test_version_and_imports():
    assert ccgeod.__version__
    chart = ccgeod.make_epsilon_chart(1.0)
    assert chart.dim == 2
    assert chart.boundary_dim == 1
    assert chart.delta == pytest.approx(0.9)
    assert "epsilon_family" in chart.id


def test_chart_loading_and_kappa():
    chart = ccgeod.load_chart("epsilon:0.5")
    assert ccgeod.kappa(chart, [0.4]) == pytest.approx(math.exp(0.2))
    with pytest.raises(ccgeod.DomainError):
        ccgeod.load_chart('{"type":"no_such_chart"}')
    with pytest.raises(ccgeod.DomainError):
        ccgeod.kappa(chart, [50.0])


def test_hyperbolic_endpoint():
    chart = ccgeod.make_epsilon_chart(0.0)
    result = ccgeod.endpoint_map(
        chart, [-1.0, 0.0], [math.cos(math.pi / 4), math.sin(math.pi / 4)]
    )
    assert result["ok"]
    assert result["endpoint"][0] == pytest.approx(math.tan(math.pi / 8), abs=1e-6)
    assert result["endpoint"][0] == pytest.approx(
        ccgeod.hyperbolic_endpoint_oracle(0.0, 1.0, math.pi / 4), abs=1e-6
    )
    assert result["diagnostics"]["final_energy_drift"] < 1e-9
    assert result["trajectory"]["termination"] == "reached_boundary"


def test_obstruction_and_ah_detection():
    assert ccgeod.obstruction(ccgeod.make_epsilon_chart(1.0), [0.0])[0] == pytest.approx(-0.5)
    points = [[-1.0 + 0.25 * i] for i in range(9)]
    ah, sup = ccgeod.is_asymptotically_hyperbolic(ccgeod.make_epsilon_chart(0.0), points)
    assert ah and sup <= 1e-8
    ah, sup = ccgeod.is_asymptotically_hyperbolic(ccgeod.make_epsilon_chart(0.5), points)
    assert not ah
    assert sup == pytest.approx(0.25, abs=1e-10)
    ah, _ = ccgeod.is_asymptotically_hyperbolic(ccgeod.make_warped_ah_chart(), points)
    assert ah


def test_boundary_shoot_fit_round_trip():
    chart = ccgeod.make_epsilon_chart(1.0)
    fit = ccgeod.boundary_shoot_fit(chart, [0.0], [0.5])
    assert fit["obstruction_fit"][0] == pytest.approx(-0.5, rel=0.02)
    assert fit["u_fit"][0] == pytest.approx(0.5, abs=5e-2)


def test_endpoint_jacobian():
    chart = ccgeod.make_epsilon_chart(0.0)
    jac = ccgeod.endpoint_jacobian(chart, [-1.0, 0.0], [1.0, 0.0])
    assert jac["jacobian"][0][0] == pytest.approx(0.5, abs=1e-5)
    assert jac["smallest_singular_value"] > 0


def test_integrator_config_round_trip():
    cfg = ccgeod.IntegratorConfig()
    cfg.rel_tol = 1e-11
    cfg.max_step = 1e-3
    chart = ccgeod.make_epsilon_chart(0.0)
    traj = ccgeod.boundary_shoot(chart, [0.0], [0.0], -0.5, cfg)
    assert traj["termination"] == "reached_limit"
    xs = [s[0] for s in traj["states"]]
    assert max(abs(x) for x in xs) < 1e-9


def test_figure_data(tmp_path):
    files = ccgeod.figure_data(1, [0.0], str(tmp_path))
    assert len(files) == 5
    for f in files:
        assert (tmp_path / f.split("/")[-1]).exists()


def test_run_checks():
    rows = ccgeod.run_checks(seed=7)
    assert len(rows) > 20
    assert all(r["pass"] for r in rows)
