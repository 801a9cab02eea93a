import math

import numpy as np
import pytest

from app.errors import CircuitFormatError, ConfigError, DimensionError, UnresolvedGateError
from app.gates import (
    Circuit,
    GateKind,
    GateOp,
    HardwareGateModel,
    I4,
    circuit_unitary,
    cphase_decomposition,
    cphase_gate,
    cz,
    hadamard,
    has_single_native_iswap,
    iswap_decomposition,
    iswap_gate,
    parse_angle,
    parse_gate_spec,
    rx,
    rz,
    rz_pair,
    single_native_iswap,
    sqrt_iswap_dag,
    swap,
    u_a,
    u_np,
    u_np_factors,
)
from app.linalg import is_unitary, phase_distance


def test_hadamard_up_to_phase():
    h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    assert phase_distance(hadamard(), h) == pytest.approx(0.0, abs=1e-12)


def test_named_gates():
    np.testing.assert_allclose(cz(), np.diag([1, 1, 1, -1]), atol=1e-12)
    np.testing.assert_allclose(iswap_gate(0), I4)
    np.testing.assert_allclose(sqrt_iswap_dag(), iswap_gate(math.pi / 4))


def test_u_np_reduces_to_iswap_and_cphase():
    theta, phi = 0.3, 0.9
    expected = iswap_gate(theta) @ cphase_gate(phi)
    np.testing.assert_allclose(u_np(theta, 0, 0, 0, phi), expected, atol=1e-12)


def test_u_np_factorization():
    args = (0.41, 0.23, -0.77, 0.58, 1.31)
    product = np.eye(4, dtype=complex)
    for f in u_np_factors(*args):
        product = product @ f
    np.testing.assert_allclose(product, u_np(*args), atol=1e-12)


@pytest.mark.parametrize("theta", [k * math.pi / 16 for k in range(-16, 17)])
def test_iswap_decomposition(theta):
    c = iswap_decomposition(theta)
    u = circuit_unitary(c, {"native": sqrt_iswap_dag()})
    assert phase_distance(u, iswap_gate(theta)) == pytest.approx(0.0, abs=1e-12)
    assert c.gate_counts() == {"n2q": 2, "nrx": 0, "nrz": 6}


@pytest.mark.parametrize("theta", [math.pi / 4, -math.pi / 4, 3 * math.pi / 4, -3 * math.pi / 4])
def test_single_native_iswap(theta):
    c = single_native_iswap(theta)
    u = circuit_unitary(c, {"native": sqrt_iswap_dag()})
    assert c.count(GateKind.NATIVE) == 1
    assert phase_distance(u, iswap_gate(theta)) == pytest.approx(0.0, abs=1e-12)


def test_single_native_iswap_rejects_other_angles():
    with pytest.raises(DimensionError):
        single_native_iswap(0.1)


@pytest.mark.parametrize("phi", [k * math.pi / 8 for k in range(0, 17)])
def test_cphase_decomposition(phi):
    c = cphase_decomposition(phi)
    u = circuit_unitary(c, {"native": cz()})
    assert phase_distance(u, cphase_gate(phi)) == pytest.approx(0.0, abs=1e-12)
    assert c.gate_counts() == {"n2q": 2, "nrx": 3, "nrz": 6}


def test_gate_op_validation():
    with pytest.raises(DimensionError):
        GateOp(GateKind.RZ, (0,))
    with pytest.raises(DimensionError):
        GateOp(GateKind.NATIVE, (1, 0), model="native")
    with pytest.raises(DimensionError):
        GateOp.rz(2, 0.1)
    with pytest.raises(DimensionError):
        GateOp(GateKind.IDLE, (0,))


def test_moment_cannot_reuse_a_qubit():
    with pytest.raises(DimensionError):
        Circuit().then(GateOp.rz(0, 0.1), GateOp.rx(0, 0.2))
    with pytest.raises(DimensionError):
        Circuit().then(GateOp.native(), GateOp.rz(1, 0.2))


def test_circuit_unitary_applies_moments_in_time_order():
    c = Circuit().then(GateOp.rz(0, 0.3)).then(GateOp.native())
    native = sqrt_iswap_dag()
    expected = native @ np.kron(rz(0.3), np.eye(2))
    np.testing.assert_allclose(circuit_unitary(c, {"native": native}), expected, atol=1e-12)


def test_unknown_native_model():
    c = Circuit().then(GateOp.native("other"))
    with pytest.raises(UnresolvedGateError):
        circuit_unitary(c, {"native": cz()})


def test_durations_and_padding():
    c = Circuit().then(GateOp.rx(0, 0.5), GateOp.rz(1, 0.2)).then(GateOp.native(duration=12.0)).then(GateOp.h(1))
    durations = {GateKind.RX: 25.0, GateKind.RZ: 10.0, GateKind.HADAMARD: 45.0}

    def resolve(op):
        return op.duration if op.duration is not None else durations[op.kind]

    assert c.slot_durations(resolve) == [25.0, 12.0, 45.0]
    assert c.duration(resolve) == 82.0
    padded = c.padded(resolve)
    assert padded.moments[2][1] == GateOp.idle(0, 45.0)
    assert len(padded.moments[1]) == 1


def test_text_round_trip():
    c = (
        Circuit()
        .then(GateOp.rz(0, 0.25), GateOp.rx(1, -1.5))
        .then(GateOp.native("noisy", duration=12.0))
        .then(GateOp.h(1))
        .then(GateOp.idle(0, 30.0))
    )
    text = c.to_text()
    assert "NAT(q0,q1,noisy,12.0ns)" in text
    assert Circuit.from_text(text) == c


def test_from_text_skips_comments_and_blank_lines():
    c = Circuit.from_text("# header\n\nRZ(q0,0.5)  RZ(q1,-0.5)\nNAT(q0,q1,native)  # entangle\n")
    assert len(c) == 2
    assert c.count(GateKind.RZ) == 2


@pytest.mark.parametrize(
    "text",
    ["RZ(q0)", "FOO(q0,1.0)", "RZ(q0,0.1) junk", "IDLE(q0,12)", "RZ(q0,0.1) RX(q0,0.2)", "NAT(q1,q0,native)"],
)
def test_from_text_errors(text):
    with pytest.raises(CircuitFormatError):
        Circuit.from_text(text)


@pytest.mark.parametrize(
    "text, value",
    [("9deg", math.radians(9)), ("pi/80", math.pi / 80), ("-3pi/4", -3 * math.pi / 4), ("pi", math.pi), ("0.5", 0.5)],
)
def test_parse_angle(text, value):
    assert parse_angle(text) == pytest.approx(value)


def test_parse_angle_error():
    with pytest.raises(ConfigError):
        parse_angle("ninety")


def test_parse_gate_spec():
    np.testing.assert_allclose(parse_gate_spec("cphase:9deg"), cphase_gate(math.radians(9)))
    np.testing.assert_allclose(parse_gate_spec("u_a:0.1,0.05,0"), u_a(0.1, 0.05, 0))
    np.testing.assert_allclose(parse_gate_spec([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, [-1, 0]]]), cz())
    with pytest.raises(ConfigError):
        parse_gate_spec("cphase:1,2")
    with pytest.raises(ConfigError):
        parse_gate_spec("toffoli")


def test_hardware_model_effective_gate():
    hw = HardwareGateModel(sqrt_iswap_dag(), cphase_gate(0.1))
    np.testing.assert_allclose(hw.effective, cphase_gate(0.1) @ sqrt_iswap_dag())


@pytest.mark.parametrize(
    "matrix",
    [
        rz(0.7),
        rx(-1.9),
        hadamard(),
        iswap_gate(0.37),
        sqrt_iswap_dag(),
        cphase_gate(2.1),
        cz(),
        swap(),
        u_np(0.41, 0.23, -0.77, 0.58, 1.31),
        u_a(0.6, 0.3, -0.2),
        rz_pair(0.5, -1.4),
    ],
)
def test_gate_constructors_are_unitary(matrix):
    assert is_unitary(matrix)


def test_u_np_preserves_excitation_number(rng):
    # |00>, {|01>, |10>}, |11> never mix
    for _ in range(50):
        u = u_np(*rng.uniform(-math.pi, math.pi, 5))
        block = np.ones((4, 4), dtype=bool)
        block[1:3, 1:3] = False
        block[0, 0] = block[3, 3] = False
        assert np.all(u[block] == 0)


def test_u_a_preserves_parity(rng):
    even, odd = [0, 3], [1, 2]
    for _ in range(50):
        u = u_a(*rng.uniform(-math.pi, math.pi, 3))
        np.testing.assert_allclose(u[np.ix_(even, odd)], 0, atol=1e-12)
        np.testing.assert_allclose(u[np.ix_(odd, even)], 0, atol=1e-12)


def test_u_np_factorization_on_random_parameters(rng):
    for _ in range(100):
        args = rng.uniform(-math.pi, math.pi, 5)
        product = np.eye(4, dtype=complex)
        for f in u_np_factors(*args):
            product = product @ f
        np.testing.assert_allclose(product, u_np(*args), atol=1e-12)


def test_circuit_unitary_composes_under_concatenation(rng):
    resolve = {"native": sqrt_iswap_dag()}
    first = iswap_decomposition(0.8)
    second = cphase_decomposition(1.1, model="native")
    joined = first + second
    expected = circuit_unitary(second, resolve) @ circuit_unitary(first, resolve)
    np.testing.assert_allclose(circuit_unitary(joined, resolve), expected, atol=1e-12)
    ops = (GateOp.rz(0, rng.uniform(-1, 1)), GateOp.rx(1, rng.uniform(-1, 1)))
    extended = joined.then(*ops)
    step = np.kron(rz(ops[0].angle), rx(ops[1].angle))
    np.testing.assert_allclose(circuit_unitary(extended, resolve), step @ expected, atol=1e-12)


def test_has_single_native_iswap():
    assert all(has_single_native_iswap(k * math.pi / 4) for k in (-3, -1, 1, 3, 5))
    assert not any(has_single_native_iswap(t) for t in (0.0, math.pi / 2, math.pi, 0.3))
