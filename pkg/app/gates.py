import logging
import math
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Mapping

import numpy as np

from app.errors import CircuitFormatError, ConfigError, DimensionError, UnresolvedGateError
from app.linalg import I2, as_matrix, check_unitary, haar_unitary, kron, pauli_product_exp

logger = logging.getLogger(__name__)

I4 = np.eye(4, dtype=complex)


def rz(theta: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=complex)


def rx(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def hadamard() -> np.ndarray:
    return rz(math.pi / 2) @ rx(math.pi / 2) @ rz(math.pi / 2)


def iswap_gate(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array(
        [[1, 0, 0, 0], [0, c, -1j * s, 0], [0, -1j * s, c, 0], [0, 0, 0, 1]],
        dtype=complex,
    )


def sqrt_iswap_dag() -> np.ndarray:
    return iswap_gate(math.pi / 4)


def cphase_gate(phi: float) -> np.ndarray:
    return np.diag([1, 1, 1, np.exp(-1j * phi)]).astype(complex)


def cz() -> np.ndarray:
    return cphase_gate(math.pi)


def swap() -> np.ndarray:
    return np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def u_np(theta: float, xi: float, chi: float, eta: float, phi: float) -> np.ndarray:
    """General excitation-number-preserving gate."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array(
        [
            [1, 0, 0, 0],
            [0, np.exp(-1j * (eta + xi)) * c, -1j * np.exp(-1j * (eta - chi)) * s, 0],
            [0, -1j * np.exp(-1j * (eta + chi)) * s, np.exp(-1j * (eta - xi)) * c, 0],
            [0, 0, 0, np.exp(-1j * (2 * eta + phi))],
        ],
        dtype=complex,
    )


def rz_pair(phi1: float, phi2: float) -> np.ndarray:
    """exp[i(φ1+φ2)/2] Rz(φ1)⊗Rz(φ2) = diag(1, e^{iφ2}, e^{iφ1}, e^{i(φ1+φ2)})."""
    return np.exp(0.5j * (phi1 + phi2)) * kron(rz(phi1), rz(phi2))


def u_np_factors(theta: float, xi: float, chi: float, eta: float, phi: float) -> list[np.ndarray]:
    """Factors whose product (left to right) equals u_np: phases around an iSWAP·CPhase core."""
    return [
        rz_pair(-eta, -eta),
        rz_pair((xi - chi) / 2, (chi - xi) / 2),
        u_np(theta, 0.0, 0.0, 0.0, phi),
        rz_pair((xi + chi) / 2, -(xi + chi) / 2),
    ]


def u_a(alpha: float, beta: float, gamma: float) -> np.ndarray:
    return pauli_product_exp(alpha, "XX") @ pauli_product_exp(beta, "YY") @ pauli_product_exp(gamma, "ZZ")


class GateKind(str, Enum):
    RZ = "RZ"
    RX = "RX"
    HADAMARD = "H"
    NATIVE = "NAT"
    IDLE = "IDLE"


@dataclass(frozen=True)
class GateOp:
    kind: GateKind
    qubits: tuple[int, ...]
    angle: float | None = None
    model: str | None = None
    # None means "resolve from the hardware or noise model"
    duration: float | None = None

    def __post_init__(self):
        expected = (0, 1) if self.kind is GateKind.NATIVE else None
        if expected is not None and tuple(self.qubits) != expected:
            raise DimensionError(f"{self.kind.value} acts on qubits (0, 1), got {self.qubits}")
        if expected is None and (len(self.qubits) != 1 or self.qubits[0] not in (0, 1)):
            raise DimensionError(f"{self.kind.value} acts on exactly one qubit, got {self.qubits}")
        if self.kind in (GateKind.RZ, GateKind.RX) and self.angle is None:
            raise DimensionError(f"{self.kind.value} needs an angle")
        if self.kind is GateKind.NATIVE and not self.model:
            raise DimensionError("native gate needs a model id")
        if self.kind is GateKind.IDLE and self.duration is None:
            raise DimensionError("idle op needs a duration")
        if self.duration is not None and self.duration < 0:
            raise DimensionError(f"negative duration {self.duration}")

    @classmethod
    def rz(cls, qubit: int, angle: float) -> "GateOp":
        return cls(GateKind.RZ, (qubit,), angle=float(angle))

    @classmethod
    def rx(cls, qubit: int, angle: float) -> "GateOp":
        return cls(GateKind.RX, (qubit,), angle=float(angle))

    @classmethod
    def h(cls, qubit: int) -> "GateOp":
        return cls(GateKind.HADAMARD, (qubit,))

    @classmethod
    def native(cls, model: str = "native", duration: float | None = None) -> "GateOp":
        return cls(GateKind.NATIVE, (0, 1), model=model, duration=duration)

    @classmethod
    def idle(cls, qubit: int, duration: float) -> "GateOp":
        return cls(GateKind.IDLE, (qubit,), duration=float(duration))

    def single_qubit_matrix(self) -> np.ndarray:
        if self.kind is GateKind.RZ:
            return rz(self.angle)
        if self.kind is GateKind.RX:
            return rx(self.angle)
        if self.kind is GateKind.HADAMARD:
            return hadamard()
        if self.kind is GateKind.IDLE:
            return I2
        raise DimensionError(f"{self.kind.value} is not a single-qubit op")

    def to_text(self) -> str:
        q = ",".join(f"q{i}" for i in self.qubits)
        if self.kind in (GateKind.RZ, GateKind.RX):
            return f"{self.kind.value}({q},{self.angle!r})"
        if self.kind is GateKind.HADAMARD:
            return f"H({q})"
        if self.kind is GateKind.IDLE:
            return f"IDLE({q},{self.duration!r}ns)"
        if self.duration is not None:
            return f"NAT({q},{self.model},{self.duration!r}ns)"
        return f"NAT({q},{self.model})"


Moment = tuple[GateOp, ...]


@dataclass(frozen=True)
class Circuit:
    moments: tuple[Moment, ...] = ()

    def __post_init__(self):
        moments = tuple(tuple(m) for m in self.moments)
        for moment in moments:
            used = [q for op in moment for q in op.qubits]
            if len(used) != len(set(used)):
                raise DimensionError(f"qubit used twice in one moment: {moment}")
        object.__setattr__(self, "moments", moments)

    def __add__(self, other: "Circuit") -> "Circuit":
        return Circuit(self.moments + other.moments)

    def __len__(self) -> int:
        return len(self.moments)

    def then(self, *ops: GateOp) -> "Circuit":
        return Circuit(self.moments + (tuple(ops),))

    def ops(self) -> Iterable[GateOp]:
        for moment in self.moments:
            yield from moment

    def count(self, kind: GateKind) -> int:
        return sum(1 for op in self.ops() if op.kind is kind)

    def gate_counts(self) -> dict[str, int]:
        """Counts in hardware primitives; a Hadamard is billed as Rz·Rx·Rz."""
        h = self.count(GateKind.HADAMARD)
        return {
            "n2q": self.count(GateKind.NATIVE),
            "nrx": self.count(GateKind.RX) + h,
            "nrz": self.count(GateKind.RZ) + 2 * h,
        }

    def slot_durations(self, resolve: Callable[[GateOp], float]) -> list[float]:
        return [max((resolve(op) for op in moment), default=0.0) for moment in self.moments]

    def duration(self, resolve: Callable[[GateOp], float]) -> float:
        return float(sum(self.slot_durations(resolve)))

    def padded(self, resolve: Callable[[GateOp], float]) -> "Circuit":
        """Fill every qubit left free in a moment with an idle op spanning the slot."""
        moments = []
        for moment, slot in zip(self.moments, self.slot_durations(resolve)):
            busy = {q for op in moment for q in op.qubits}
            idles = tuple(GateOp.idle(q, slot) for q in (0, 1) if q not in busy)
            moments.append(tuple(moment) + idles)
        return Circuit(tuple(moments))

    def to_text(self) -> str:
        return "\n".join(" ".join(op.to_text() for op in moment) for moment in self.moments)

    @classmethod
    def from_text(cls, text: str) -> "Circuit":
        moments = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = _OP_TOKEN.findall(line)
            if not tokens or _WS.sub("", "".join(tokens)) != _WS.sub("", line):
                raise CircuitFormatError(f"line {lineno}: cannot parse {line!r}")
            moments.append(tuple(_parse_op(token, lineno) for token in tokens))
        try:
            return cls(tuple(moments))
        except DimensionError as exc:
            raise CircuitFormatError(str(exc)) from exc


_OP_TOKEN = re.compile(r"[A-Z]+\([^)]*\)")
_QUBIT = re.compile(r"^q([01])$")
_WS = re.compile(r"\s+")


def _parse_duration(raw: str, lineno: int) -> float:
    if not raw.endswith("ns"):
        raise CircuitFormatError(f"line {lineno}: duration {raw!r} must end in 'ns'")
    return float(raw[:-2])


def _parse_op(token: str, lineno: int) -> GateOp:
    name, _, rest = token.partition("(")
    args = [a.strip() for a in rest[:-1].split(",")]
    try:
        qubits = []
        while args and _QUBIT.match(args[0]):
            qubits.append(int(_QUBIT.match(args.pop(0)).group(1)))
        kind = GateKind(name)
        if kind in (GateKind.RZ, GateKind.RX):
            return GateOp(kind, tuple(qubits), angle=float(args[0]))
        if kind is GateKind.HADAMARD:
            return GateOp(kind, tuple(qubits))
        if kind is GateKind.IDLE:
            return GateOp(kind, tuple(qubits), duration=_parse_duration(args[0], lineno))
        duration = _parse_duration(args[1], lineno) if len(args) > 1 else None
        return GateOp(kind, tuple(qubits), model=args[0], duration=duration)
    except (ValueError, IndexError, DimensionError) as exc:
        raise CircuitFormatError(f"line {lineno}: bad op {token!r}: {exc}") from exc


@dataclass(frozen=True)
class HardwareGateModel:
    ideal: np.ndarray
    parasitic: np.ndarray = field(default_factory=lambda: I4.copy())
    duration: float | None = None
    label: str = "native"

    def __post_init__(self):
        object.__setattr__(self, "ideal", check_unitary(self.ideal))
        object.__setattr__(self, "parasitic", check_unitary(self.parasitic))
        if self.duration is not None and self.duration < 0:
            raise DimensionError(f"negative duration {self.duration}")

    @property
    def effective(self) -> np.ndarray:
        return self.parasitic @ self.ideal


def moment_unitary(moment: Moment, resolve: Mapping[str, np.ndarray]) -> np.ndarray:
    locals_ = [I2, I2]
    native = None
    for op in moment:
        if op.kind is GateKind.NATIVE:
            if op.model not in resolve:
                raise UnresolvedGateError(f"unknown native model {op.model!r}")
            native = np.asarray(resolve[op.model], dtype=complex)
        else:
            locals_[op.qubits[0]] = op.single_qubit_matrix()
    return native if native is not None else kron(locals_[0], locals_[1])


def circuit_unitary(c: Circuit, resolve: Mapping[str, np.ndarray]) -> np.ndarray:
    u = I4.copy()
    for moment in c.moments:
        u = moment_unitary(moment, resolve) @ u
    return u


def resolve_effective(models: Mapping[str, HardwareGateModel]) -> dict[str, np.ndarray]:
    return {name: hw.effective for name, hw in models.items()}


def iswap_decomposition(theta: float, model: str = "native") -> Circuit:
    """iSWAP(θ) from two √iSWAP† natives and three Rz layers."""
    edge = math.pi / 4
    middle = theta - math.pi / 2
    return (
        Circuit()
        .then(GateOp.rz(0, edge), GateOp.rz(1, -edge))
        .then(GateOp.native(model))
        .then(GateOp.rz(0, middle), GateOp.rz(1, -middle))
        .then(GateOp.native(model))
        .then(GateOp.rz(0, edge), GateOp.rz(1, -edge))
    )


def _same_angle(a: float, b: float) -> bool:
    return abs(math.remainder(a - b, 2 * math.pi)) < 1e-12


SINGLE_NATIVE_ANGLES = (math.pi / 4, -math.pi / 4, 3 * math.pi / 4, -3 * math.pi / 4)


def has_single_native_iswap(theta: float) -> bool:
    return any(_same_angle(theta, a) for a in SINGLE_NATIVE_ANGLES)


def single_native_iswap(theta: float, model: str = "native") -> Circuit:
    """One-native decompositions of iSWAP(θ) for θ in {π/4, -π/4, ±3π/4}."""
    n = GateOp.native(model)
    if _same_angle(theta, math.pi / 4):
        return Circuit().then(n)
    if _same_angle(theta, -math.pi / 4):
        return Circuit().then(GateOp.rz(0, math.pi)).then(n).then(GateOp.rz(0, math.pi))
    if _same_angle(theta, 3 * math.pi / 4):
        return Circuit().then(GateOp.rz(0, math.pi)).then(n).then(GateOp.rz(1, math.pi))
    if _same_angle(theta, -3 * math.pi / 4):
        return Circuit().then(n).then(GateOp.rz(0, math.pi), GateOp.rz(1, math.pi))
    raise DimensionError(f"iSWAP({theta}) has no single-native decomposition")


def cphase_decomposition(phi: float, model: str = "native") -> Circuit:
    """CPhase(φ) from two CZ natives: exp(-iφ/4 ZZ) conjugated by H on the second qubit."""
    return (
        Circuit()
        .then(GateOp.h(1))
        .then(GateOp.native(model))
        .then(GateOp.rx(1, phi / 2))
        .then(GateOp.native(model))
        .then(GateOp.h(1))
        .then(GateOp.rz(0, -phi / 2), GateOp.rz(1, -phi / 2))
    )


_ANGLE = re.compile(r"^(-)?(\d*\.?\d*)\*?pi(?:/(\d*\.?\d+))?$")


def parse_angle(text: str) -> float:
    """Angles as radians ('0.785'), degrees ('9deg') or multiples of pi ('pi/80', '-3pi/4')."""
    raw = str(text).strip().replace(" ", "")
    try:
        if raw.endswith("deg"):
            return math.radians(float(raw[:-3]))
        match = _ANGLE.match(raw)
        if match:
            sign, coeff, denom = match.groups()
            value = (float(coeff) if coeff else 1.0) * math.pi / (float(denom) if denom else 1.0)
            return -value if sign else value
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"cannot parse angle {text!r}") from exc


def matrix_from_pairs(rows) -> np.ndarray:
    """4×4 matrix from nested entries given as [re, im] pairs or plain numbers."""
    try:
        entries = [[complex(*e) if isinstance(e, (list, tuple)) else complex(e) for e in row] for row in rows]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"cannot read matrix entries: {exc}") from exc
    return check_unitary(as_matrix(entries, (4, 4)))


def matrix_to_pairs(m: np.ndarray) -> list[list[list[float]]]:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


_NAMED = {
    "identity": lambda: I4.copy(),
    "cz": cz,
    "sqrt_iswap_dag": sqrt_iswap_dag,
    "swap": swap,
}


def parse_gate_spec(spec) -> np.ndarray:
    """Resolve a gate description such as 'iswap:0.785', 'cphase:9deg' or 'u_a:a,b,c'."""
    if not isinstance(spec, str):
        return matrix_from_pairs(spec)
    name, _, args = spec.strip().partition(":")
    name = name.lower()
    if name in _NAMED:
        return _NAMED[name]()
    params = [a for a in args.split(",") if a.strip()]
    if name == "haar":
        try:
            seed = int(params[0]) if params else 0
        except ValueError as exc:
            raise ConfigError(f"haar seed must be an integer, got {params[0]!r}") from exc
        return haar_unitary(4, np.random.default_rng(seed))
    builders = {"iswap": (iswap_gate, 1), "cphase": (cphase_gate, 1), "u_a": (u_a, 3), "u_np": (u_np, 5)}
    if name not in builders:
        raise ConfigError(f"unknown gate {spec!r}")
    builder, arity = builders[name]
    if len(params) != arity:
        raise ConfigError(f"{name} takes {arity} angle(s), got {len(params)}")
    return builder(*(parse_angle(p) for p in params))
