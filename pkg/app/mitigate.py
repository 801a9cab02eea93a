import logging
import math
from dataclasses import dataclass

import numpy as np

from app.gates import Circuit, GateKind, GateOp
from app.kak import kak_decompose
from app.linalg import check_unitary, dagger, kron

logger = logging.getLogger(__name__)

DIAGONAL_ATOL = 1e-9
NEGLIGIBLE_ANGLE = 1e-12


def wrap_angle(theta: float) -> float:
    """Map to (-π, π]."""
    wrapped = math.remainder(theta, 2 * math.pi)
    return math.pi if wrapped == -math.pi else wrapped


def zxz_angles(u: np.ndarray) -> tuple[float, float, float]:
    """Angles (a, b, c) with u ∝ Rz(c)·Rx(b)·Rz(a), i.e. Rz(a) applied first."""
    v = u / np.sqrt(np.linalg.det(u))
    b = 2 * math.atan2(abs(v[1, 0]), abs(v[0, 0]))
    total = -2 * np.angle(v[0, 0]) if abs(v[0, 0]) > DIAGONAL_ATOL else 0.0
    diff = -2 * np.angle(v[1, 0]) - math.pi if abs(v[1, 0]) > DIAGONAL_ATOL else 0.0
    return wrap_angle((total + diff) / 2), wrap_angle(b), wrap_angle((total - diff) / 2)


def is_z_rotation(u: np.ndarray) -> bool:
    return abs(u[0, 1]) < DIAGONAL_ATOL and abs(u[1, 0]) < DIAGONAL_ATOL


def z_angle(u: np.ndarray) -> float:
    return wrap_angle(float(np.angle(u[1, 1]) - np.angle(u[0, 0])))


@dataclass(frozen=True)
class MitigationPlan:
    correction: np.ndarray
    per_qubit: tuple[np.ndarray, np.ndarray]
    predicted_fidelity: float
    unmitigated_fidelity: float
    parasitic_triple: tuple[float, float, float]

    @property
    def euler_angles(self) -> tuple[tuple[float, float, float], tuple[float, float, float]]:
        return zxz_angles(self.per_qubit[0]), zxz_angles(self.per_qubit[1])

    @property
    def is_diagonal(self) -> bool:
        return all(is_z_rotation(c) for c in self.per_qubit)


def unitary_fidelity(target: np.ndarray, actual: np.ndarray) -> float:
    """(|Tr(U†V)|²/d + 1)/(d + 1) for d = 4."""
    overlap = abs(np.trace(dagger(target) @ actual)) ** 2
    return float((overlap / 4 + 1) / 5)


def unmitigated_fidelity(parasitic) -> float:
    u = check_unitary(parasitic)
    return float((abs(np.trace(u)) ** 2 / 4 + 1) / 5)


def max_mitigated_fidelity(alpha_e: float, beta_e: float, gamma_e: float) -> float:
    c = (math.cos(alpha_e) * math.cos(beta_e) * math.cos(gamma_e)) ** 2
    s = (math.sin(alpha_e) * math.sin(beta_e) * math.sin(gamma_e)) ** 2
    return (1 + 4 * c + 4 * s) / 5


def kak_approx(parasitic) -> MitigationPlan:
    """Single-qubit correction K_EM = K_Er† K_El† undoing the local part of a parasitic gate."""
    u = check_unitary(parasitic)
    kak = kak_decompose(u)
    c0 = dagger(kak.k3) @ dagger(kak.k1)
    c1 = dagger(kak.k4) @ dagger(kak.k2)
    plan = MitigationPlan(
        correction=kron(c0, c1),
        per_qubit=(c0, c1),
        predicted_fidelity=max_mitigated_fidelity(*kak.triple),
        unmitigated_fidelity=unmitigated_fidelity(u),
        parasitic_triple=kak.triple,
    )
    logger.debug(
        "parasitic triple %s: fidelity %.12f -> %.12f",
        kak.triple,
        plan.unmitigated_fidelity,
        plan.predicted_fidelity,
    )
    return plan


def small_angle_infidelities(phi: float) -> tuple[float, float]:
    return 3 * phi**2 / 20, phi**2 / 20


def composite_infidelities(psi: float, n_native: int = 2) -> tuple[float, float]:
    """Exact infidelities of a gate built from n natives each carrying CPhase(ψ), before and after KAK-Approx."""
    total = n_native * psi
    return 1 - (3 * math.cos(total) + 7) / 10, 1 - (2 * math.cos(total / 2) + 3) / 5


def _is_rz_moment(moment) -> bool:
    return bool(moment) and all(op.kind is GateKind.RZ for op in moment)


def _merge_rz(moment, angles: dict[int, float]):
    merged = []
    pending = dict(angles)
    for op in moment:
        q = op.qubits[0]
        if q in pending:
            op = GateOp.rz(q, wrap_angle(op.angle + pending.pop(q)))
        if abs(op.angle) > NEGLIGIBLE_ANGLE:
            merged.append(op)
    merged.extend(GateOp.rz(q, a) for q, a in pending.items() if abs(a) > NEGLIGIBLE_ANGLE)
    return tuple(sorted(merged, key=lambda op: op.qubits))


def apply_kak_approx(circuit: Circuit, plan: MitigationPlan, model: str | None = None) -> Circuit:
    """Insert the correction after every native gate (of `model`, or of any model).

    Z-only corrections are folded into the Rz layer that follows the native gate,
    so they cost nothing; other corrections become explicit Z-X-Z moments.
    """
    moments = list(circuit.moments)
    out = []
    i = 0
    while i < len(moments):
        moment = moments[i]
        out.append(moment)
        i += 1
        natives = [op for op in moment if op.kind is GateKind.NATIVE and (model is None or op.model == model)]
        if not natives:
            continue
        if plan.is_diagonal:
            angles = {q: z_angle(c) for q, c in enumerate(plan.per_qubit)}
            if i < len(moments) and _is_rz_moment(moments[i]):
                moments[i] = _merge_rz(moments[i], angles)
            else:
                extra = _merge_rz((), angles)
                if extra:
                    out.append(extra)
            continue
        first, rot, last = zip(*plan.euler_angles)
        for layer, kind in ((first, GateKind.RZ), (rot, GateKind.RX), (last, GateKind.RZ)):
            ops = tuple(GateOp(kind, (q,), angle=a) for q, a in enumerate(layer) if abs(a) > NEGLIGIBLE_ANGLE)
            if ops:
                out.append(ops)
    return Circuit(tuple(m for m in out if m))
