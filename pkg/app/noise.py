import json
import logging
import math
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np
from pydantic import BaseModel, Field, ValidationError, field_validator

from app.errors import ChannelError, ConfigError, UnresolvedGateError
from app.gates import Circuit, GateKind, GateOp, HardwareGateModel, moment_unitary, resolve_effective
from app.linalg import PAULI, as_matrix, check_unitary, dagger, lift

logger = logging.getLogger(__name__)

TP_ATOL = 1e-12
CP_ATOL = 1e-10
# tolerance for composed circuit channels
FIDELITY_TP_ATOL = 1e-10
DIM = 4


@dataclass(frozen=True)
class Superoperator:
    """16×16 matrix acting on column-stacked 4×4 density matrices."""

    matrix: np.ndarray

    @classmethod
    def identity(cls) -> "Superoperator":
        return cls(np.eye(DIM * DIM, dtype=complex))

    def __matmul__(self, other: "Superoperator") -> "Superoperator":
        # self after other
        return Superoperator(self.matrix @ other.matrix)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        out = self.matrix @ np.asarray(rho, dtype=complex).reshape(-1, order="F")
        return out.reshape(DIM, DIM, order="F")

    def choi(self) -> np.ndarray:
        return choi_matrix(self)

    def is_trace_preserving(self, atol: float = TP_ATOL) -> bool:
        return is_trace_preserving(self, atol)

    def is_completely_positive(self, atol: float = CP_ATOL) -> bool:
        return is_completely_positive(self, atol)


def unitary_superop(u) -> Superoperator:
    u = as_matrix(u, (DIM, DIM))
    return Superoperator(np.kron(np.conj(u), u))


def kraus_superop(kraus) -> Superoperator:
    return Superoperator(sum(np.kron(np.conj(k), k) for k in kraus))


def damping_probability(duration_ns: float, t1_us: float) -> float:
    return -math.expm1(-duration_ns / (t1_us * 1000.0))


def amplitude_damping_superop(duration_ns: float, t1_us: float, qubit: int) -> Superoperator:
    if duration_ns < 0:
        raise ChannelError(f"negative duration {duration_ns}")
    p = damping_probability(duration_ns, t1_us)
    k0 = np.array([[1, 0], [0, math.sqrt(1 - p)]], dtype=complex)
    k1 = np.array([[0, math.sqrt(p)], [0, 0]], dtype=complex)
    return kraus_superop([lift(k0, qubit), lift(k1, qubit)])


def _twirl(qubits: tuple[int, ...]) -> np.ndarray:
    paulis = list(PAULI.values())
    if len(qubits) == 1:
        ops = [lift(p, qubits[0]) for p in paulis]
    else:
        ops = [np.kron(p, q) for p in paulis for q in paulis]
    return sum(unitary_superop(op).matrix for op in ops) / len(ops)


def depolarizing_superop(p: float, qubits: tuple[int, ...] = (0, 1)) -> Superoperator:
    """ρ → (1-p)ρ + p·(I/d ⊗ Tr_sub ρ) on the listed qubits."""
    if not 0 <= p <= 1:
        raise ChannelError(f"depolarizing probability {p} outside [0, 1]")
    qubits = tuple(sorted(set(qubits)))
    if qubits not in ((0,), (1,), (0, 1)):
        raise ChannelError(f"unsupported qubit set {qubits}")
    return Superoperator((1 - p) * np.eye(DIM * DIM) + p * _twirl(qubits))


def choi_matrix(channel: Superoperator) -> np.ndarray:
    s = channel.matrix
    choi = np.zeros((DIM * DIM, DIM * DIM), dtype=complex)
    for i in range(DIM):
        for j in range(DIM):
            block = s[:, j * DIM + i].reshape(DIM, DIM, order="F")
            choi[i * DIM : (i + 1) * DIM, j * DIM : (j + 1) * DIM] = block
    return choi


def is_trace_preserving(channel: Superoperator, atol: float = TP_ATOL) -> bool:
    vec_identity = np.eye(DIM).reshape(-1, order="F")
    return bool(np.allclose(vec_identity @ channel.matrix, vec_identity, atol=atol, rtol=0))


def is_completely_positive(channel: Superoperator, atol: float = CP_ATOL) -> bool:
    choi = choi_matrix(channel)
    return bool(np.linalg.eigvalsh((choi + dagger(choi)) / 2).min() >= -atol)


class NoiseModel(BaseModel):
    name: str = "custom"
    t1_us: float = Field(gt=0)
    durations_ns: dict[str, float]
    p_x: float = Field(default=0.0, ge=0, le=1)
    p_2q: float = Field(default=0.0, ge=0, le=1)
    p_rz: float = 0.0

    @field_validator("durations_ns")
    @classmethod
    def _non_negative(cls, value: dict[str, float]) -> dict[str, float]:
        for kind, ns in value.items():
            if ns < 0:
                raise ValueError(f"duration of {kind!r} is negative")
        return value

    @field_validator("p_rz")
    @classmethod
    def _virtual_rz(cls, value: float) -> float:
        if value != 0:
            raise ValueError("Rz gates carry no depolarizing error")
        return value

    def duration(self, key: str) -> float:
        if key not in self.durations_ns:
            raise UnresolvedGateError(f"noise model {self.name!r} has no duration for {key!r}")
        return self.durations_ns[key]

    @classmethod
    def preset(cls, name: str) -> "NoiseModel":
        if name not in PRESETS:
            raise ConfigError(f"unknown noise preset {name!r}, expected one of {sorted(PRESETS)}")
        return cls.model_validate(PRESETS[name] | {"name": name})

    @classmethod
    def noiseless(cls, durations_ns: dict[str, float] | None = None) -> "NoiseModel":
        return cls(name="noiseless", t1_us=math.inf, durations_ns=durations_ns or TABLE_I_DURATIONS)

    @classmethod
    def from_file(cls, path: str | Path) -> "NoiseModel":
        data = load_document(path)
        if "preset" in data:
            base = PRESETS.get(data.pop("preset"))
            if base is None:
                raise ConfigError(f"unknown noise preset in {path}")
            data = base | data
        try:
            return cls.model_validate(data)
        except ValidationError as exc:
            raise ConfigError(f"invalid noise model in {path}: {exc}") from exc


def load_document(path: str | Path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        if path.suffix == ".toml":
            return tomllib.loads(text)
        return json.loads(text)
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc


TABLE_I_DURATIONS = {"rx": 25.0, "rz": 10.0, "native": 12.0}
TABLE_II_DURATIONS = {"rx": 25.0, "rz": 0.0, "native": 15.0}

PRESETS = {
    "tableI-1": {"t1_us": 25.0, "durations_ns": TABLE_I_DURATIONS, "p_x": 0.0003, "p_2q": 0.0048},
    "tableI-2": {"t1_us": 25.0, "durations_ns": TABLE_I_DURATIONS, "p_x": 0.001, "p_2q": 0.005},
    "tableI-t1": {"t1_us": 25.0, "durations_ns": TABLE_I_DURATIONS},
    "tableII-1": {"t1_us": 25.0, "durations_ns": TABLE_II_DURATIONS, "p_x": 0.0003, "p_2q": 0.0047},
    "tableII-2": {"t1_us": 25.0, "durations_ns": TABLE_II_DURATIONS, "p_x": 0.001, "p_2q": 0.005},
    "tableII-t1": {"t1_us": 25.0, "durations_ns": TABLE_II_DURATIONS},
}


def op_duration(op: GateOp, hw: Mapping[str, HardwareGateModel], nm: NoiseModel) -> float:
    if op.duration is not None:
        return op.duration
    if op.kind is GateKind.RZ:
        return nm.duration("rz")
    if op.kind is GateKind.RX:
        return nm.duration("rx")
    if op.kind is GateKind.HADAMARD:
        return nm.duration("rx") + 2 * nm.duration("rz")
    if op.kind is GateKind.NATIVE:
        if op.model not in hw:
            raise UnresolvedGateError(f"unknown native model {op.model!r}")
        if hw[op.model].duration is not None:
            return hw[op.model].duration
        return nm.duration("native")
    raise UnresolvedGateError(f"no duration for {op.kind.value}")


def circuit_superop(c: Circuit, hw: Mapping[str, HardwareGateModel], nm: NoiseModel) -> Superoperator:
    """Per moment: the gate unitary, relaxation over the slot on both qubits, then gate depolarizing."""
    effective = resolve_effective(hw)

    def resolve(op: GateOp) -> float:
        return op_duration(op, hw, nm)

    channel = Superoperator.identity()
    padded = c.padded(resolve)
    for moment, slot in zip(padded.moments, padded.slot_durations(resolve)):
        step = unitary_superop(moment_unitary(moment, effective))
        if slot > 0:
            for q in (0, 1):
                step = amplitude_damping_superop(slot, nm.t1_us, q) @ step
        for op in moment:
            if op.kind in (GateKind.RX, GateKind.HADAMARD) and nm.p_x > 0:
                step = depolarizing_superop(nm.p_x, op.qubits) @ step
            elif op.kind is GateKind.NATIVE and nm.p_2q > 0:
                step = depolarizing_superop(nm.p_2q, (0, 1)) @ step
        channel = step @ channel
    return channel


def avg_gate_fidelity(target, channel: Superoperator, check: bool = True) -> float:
    """(Re Tr(S_U† S_E)/d + 1)/(d + 1) for d = 4."""
    if check and not is_trace_preserving(channel, FIDELITY_TP_ATOL):
        raise ChannelError("channel is not trace preserving")
    if check and not is_completely_positive(channel):
        raise ChannelError("channel is not completely positive")
    s_u = unitary_superop(check_unitary(target)).matrix
    process = np.trace(dagger(s_u) @ channel.matrix).real
    return float((process / DIM + 1) / (DIM + 1))


def monte_carlo_fidelity(
    target, channel: Superoperator, samples: int, rng: np.random.Generator
) -> tuple[float, float]:
    """Mean and standard error of ⟨ψ|U† E(|ψ⟩⟨ψ|) U|ψ⟩ over Haar-random pure states."""
    u = check_unitary(target)
    psi = rng.standard_normal((samples, DIM)) + 1j * rng.standard_normal((samples, DIM))
    psi /= np.linalg.norm(psi, axis=1, keepdims=True)
    rho_vec = np.einsum("ni,nj->nji", psi, np.conj(psi)).reshape(samples, DIM * DIM)
    out = (rho_vec @ channel.matrix.T).reshape(samples, DIM, DIM).transpose(0, 2, 1)
    phi = psi @ u.T
    values = np.einsum("ni,nij,nj->n", np.conj(phi), out, phi).real
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(samples))
