import math

import numpy as np
import pytest

from app.experiments import SweepSpec, crossover_report, run_sweep, summarize
from app.gates import (
    HardwareGateModel,
    I4,
    circuit_unitary,
    cphase_gate,
    cz,
    iswap_decomposition,
    iswap_gate,
    sqrt_iswap_dag,
)
from app.kak import in_weyl_chamber, kak_decompose, local_invariants
from app.linalg import haar_unitary, kron, phase_distance
from app.mitigate import apply_kak_approx, kak_approx, unitary_fidelity
from app.recompile import OptimizerConfig, expressivity_scan, optimize_local_dressing


def _fidelities(phi, theta=1.0):
    hw = HardwareGateModel(sqrt_iswap_dag(), cphase_gate(phi))
    resolve = {"native": hw.effective}
    baseline = iswap_decomposition(theta)
    mitigated = apply_kak_approx(baseline, kak_approx(cphase_gate(phi)))
    target = iswap_gate(theta)
    return (
        unitary_fidelity(target, circuit_unitary(baseline, resolve)),
        unitary_fidelity(target, circuit_unitary(mitigated, resolve)),
    )


def test_single_gate_closed_forms_over_angle_range():
    native = sqrt_iswap_dag()
    for phi in np.linspace(math.pi / 100, math.pi, 100):
        parasitic = cphase_gate(phi)
        plan = kak_approx(parasitic)
        corrected = unitary_fidelity(native, plan.correction @ parasitic @ native)
        assert corrected == pytest.approx((2 * math.cos(phi / 2) + 3) / 5, abs=1e-10)
        assert unitary_fidelity(native, parasitic @ native) == pytest.approx((3 * math.cos(phi) + 7) / 10, abs=1e-10)
        assert plan.unmitigated_fidelity == pytest.approx((3 * math.cos(phi) + 7) / 10, abs=1e-10)
        assert plan.predicted_fidelity == pytest.approx((2 * math.cos(phi / 2) + 3) / 5, abs=1e-10)


def test_factor_of_three_below_five_degrees():
    for deg in np.linspace(0.1, 5, 50):
        plan = kak_approx(cphase_gate(math.radians(deg)))
        ratio = (1 - plan.unmitigated_fidelity) / (1 - plan.predicted_fidelity)
        assert 2.97 <= ratio <= 3.03


def test_composite_iswap_at_nine_degrees():
    before, after = _fidelities(math.radians(9))
    assert 1 - before == pytest.approx(0.0148, abs=2e-4)
    assert 1 - after == pytest.approx(0.0049, abs=2e-4)


def test_kak_round_trip_and_local_invariance():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        u = haar_unitary(4, rng)
        kak = kak_decompose(u)
        assert phase_distance(kak.recompose(), u) < 1e-9
        assert in_weyl_chamber(kak.triple)
        dressed = kron(haar_unitary(2, rng), haar_unitary(2, rng)) @ u @ kron(haar_unitary(2, rng), haar_unitary(2, rng))
        np.testing.assert_allclose(local_invariants(dressed), kak.triple, atol=1e-8)


@pytest.mark.slow
def test_kak_approx_is_never_beaten():
    rng = np.random.default_rng(7)
    for i in range(200):
        locals_ = kron(haar_unitary(2, rng), haar_unitary(2, rng))
        parasitic = locals_ @ kak_decompose(haar_unitary(4, rng)).interaction()
        best, _ = optimize_local_dressing(I4, parasitic, OptimizerConfig(restarts=10, seed=i))
        assert best <= kak_approx(parasitic).predicted_fidelity + 1e-6


@pytest.mark.slow
@pytest.mark.parametrize(
    "native, exact_fraction, loose_fraction",
    [(sqrt_iswap_dag, 0.53, 0.70), (cz, 0.13, 0.36)],
)
def test_two_gate_expressivity(native, exact_fraction, loose_fraction):
    records = expressivity_scan(HardwareGateModel(native()), math.pi / 40, 2, workers=4)
    infidelities = np.array([r.infidelity for r in records])
    assert np.mean(infidelities <= 1e-8) == pytest.approx(exact_fraction, abs=0.05)
    assert np.mean(infidelities <= 5e-3) == pytest.approx(loose_fraction, abs=0.05)


@pytest.mark.slow
@pytest.mark.parametrize("psi, expected", [(7.0, 0.0010), (9.0, 0.0017)])
def test_recompile_two_gates_under_parasitic_cphase(psi, expected):
    spec = SweepSpec(strategies=["Recompile-2G"], parasitic_angles_deg=[psi])
    (summary,) = summarize(run_sweep(spec, workers=4))
    assert 1 - summary.mean_fidelity == pytest.approx(expected, abs=5e-4)


@pytest.fixture(scope="module")
def rz_vs_kak_records():
    spec = SweepSpec(strategies=["KAK-Approx", "Recompile-RZ-2G"], parasitic_angles_deg=[9.0])
    return run_sweep(spec, workers=4)


@pytest.mark.slow
def test_rz_recompile_uses_one_gate_near_the_native_angles(rz_vs_kak_records):
    rz = [r for r in rz_vs_kak_records if r.strategy == "Recompile-RZ-2G"]
    assert len(rz) == 80
    single = [r for r in rz if r.n2q == 1]
    assert len(single) / len(rz) == pytest.approx(0.09, abs=0.05)
    assert all(r.nrx == 0 for r in rz)


@pytest.mark.slow
def test_rz_recompile_is_no_worse_than_kak_approx_on_average(rz_vs_kak_records):
    means = {s.strategy: s.mean_fidelity for s in summarize(rz_vs_kak_records)}
    assert 1 - means["Recompile-RZ-2G"] <= 1 - means["KAK-Approx"] + 1e-6


@pytest.mark.slow
def test_relaxation_only_crossover():
    spec = SweepSpec.model_validate(
        {
            "strategies": ["KAK-Approx", "Recompile-3G"],
            "target_family": {"kind": "iswap_grid", "count": 20},
            "parasitic_angles_deg": list(range(0, 21, 2)),
            "noise": "tableI-t1",
            "restarts": 10,
        }
    )
    (crossing,) = crossover_report(run_sweep(spec, workers=4))
    assert crossing.angle_deg == pytest.approx(11, abs=3)


@pytest.mark.slow
@pytest.mark.parametrize("long_label, expected", [("4XLong-2G", 6.0), ("2XLong-2G", 4.0)])
def test_long_duration_crossover(long_label, expected):
    spec = SweepSpec.model_validate(
        {
            "strategies": ["KAK-Approx", long_label],
            "target_family": {"kind": "iswap_grid", "count": 20},
            "parasitic_angles_deg": list(range(0, 13)),
            "noise": "tableI-1",
        }
    )
    (crossing,) = crossover_report(run_sweep(spec))
    assert crossing.angle_deg == pytest.approx(expected, abs=2)


@pytest.mark.slow
def test_recompile_wins_on_the_weyl_grid_with_depolarizing_noise():
    spec = SweepSpec.model_validate(
        {
            "strategies": ["NoMitigate", "KAK-Approx", "Recompile-3G"],
            "target_family": {"kind": "weyl_grid", "step_divisor": 16},
            "parasitic_angles_deg": [3.0, 6.0, 9.0],
            "noise": "tableI-1",
            "restarts": 10,
        }
    )
    summary = summarize(run_sweep(spec, workers=4))
    for psi in (3.0, 6.0, 9.0):
        rows = {s.strategy: s.mean_fidelity for s in summary if s.parasitic_deg == psi}
        assert max(rows, key=rows.get) == "Recompile-3G"
