import logging
import math
from dataclasses import dataclass

import numpy as np

from app.errors import ConfigError, DecompositionError
from app.gates import u_a
from app.linalg import (
    I2,
    PAULI,
    RECONSTRUCTION_ATOL,
    as_matrix,
    check_unitary,
    dagger,
    eig_unitary_symmetric,
    kron,
    kron_factor,
)

logger = logging.getLogger(__name__)

CHAMBER_ATOL = 1e-9

# columns: Φ+, iΨ+, Ψ-, iΦ-
MAGIC = np.array(
    [[1, 0, 0, 1j], [0, 1j, 1, 0], [0, 1j, -1, 0], [1, 0, 0, -1j]],
    dtype=complex,
) / math.sqrt(2)

_AXES = ("X", "Y", "Z")


@dataclass(frozen=True)
class KakDecomposition:
    alpha: float
    beta: float
    gamma: float
    k1: np.ndarray
    k2: np.ndarray
    k3: np.ndarray
    k4: np.ndarray
    global_phase: complex

    @property
    def triple(self) -> tuple[float, float, float]:
        return self.alpha, self.beta, self.gamma

    @property
    def k_left(self) -> np.ndarray:
        return kron(self.k1, self.k2)

    @property
    def k_right(self) -> np.ndarray:
        return kron(self.k3, self.k4)

    def interaction(self) -> np.ndarray:
        return u_a(self.alpha, self.beta, self.gamma)

    def recompose(self) -> np.ndarray:
        return self.global_phase * self.k_left @ self.interaction() @ self.k_right


@dataclass(frozen=True)
class CanonicalForm:
    """U_A(input) = phase · (left[0]⊗left[1]) · U_A(triple) · (right[0]⊗right[1])."""

    triple: tuple[float, float, float]
    left: tuple[np.ndarray, np.ndarray]
    right: tuple[np.ndarray, np.ndarray]
    phase: complex


class _Canonicalizer:
    def __init__(self, v):
        self.v = [float(x) for x in v]
        self.phase = 1 + 0j
        self.left = [I2.copy(), I2.copy()]
        self.right = [I2.copy(), I2.copy()]

    def shift(self, k: int, step: int) -> None:
        self.v[k] += step * math.pi / 2
        self.phase *= 1j**step
        g = np.linalg.matrix_power(1j * PAULI[_AXES[k]], step % 4)
        self.right = [g @ r for r in self.right]

    def canonical_shift(self, k: int) -> None:
        # into (-π/4, π/4]
        step = -math.floor((self.v[k] + math.pi / 4) / (math.pi / 2))
        if self.v[k] + step * math.pi / 2 <= -math.pi / 4:
            step += 1
        if step:
            self.shift(k, step)

    def negate(self, k1: int, k2: int) -> None:
        self.v[k1] = -self.v[k1]
        self.v[k2] = -self.v[k2]
        self.phase *= -1
        q = 1j * PAULI[_AXES[3 - k1 - k2]]
        self.left[0] = self.left[0] @ q
        self.right[0] = q @ self.right[0]

    def swap(self, k1: int, k2: int) -> None:
        self.v[k1], self.v[k2] = self.v[k2], self.v[k1]
        s = -1j * (PAULI[_AXES[k1]] + PAULI[_AXES[k2]]) / math.sqrt(2)
        self.left = [l @ dagger(s) for l in self.left]
        self.right = [s @ r for r in self.right]

    def sort(self) -> None:
        for i in range(3):
            for j in range(2 - i):
                if abs(self.v[j]) < abs(self.v[j + 1]):
                    self.swap(j, j + 1)


def canonicalize(alpha: float, beta: float, gamma: float, atol: float = CHAMBER_ATOL) -> CanonicalForm:
    c = _Canonicalizer((alpha, beta, gamma))
    for k in range(3):
        c.canonical_shift(k)
    c.sort()
    if c.v[0] < 0:
        c.negate(0, 2)
    if c.v[1] < 0:
        c.negate(1, 2)
    c.canonical_shift(2)
    if c.v[0] > math.pi / 4 - atol and c.v[2] < 0:
        c.shift(0, -1)
        c.negate(0, 2)
    triple = tuple(x + 0.0 for x in c.v)
    return CanonicalForm(triple, tuple(c.left), tuple(c.right), c.phase)


def in_weyl_chamber(triple, atol: float = CHAMBER_ATOL) -> bool:
    a, b, g = triple
    if not (math.pi / 4 + atol >= a >= b - atol and b >= abs(g) - atol):
        return False
    return not (a > math.pi / 4 - atol and g < -atol)


def kak_decompose(u) -> KakDecomposition:
    u = check_unitary(as_matrix(u, (4, 4)))
    root = np.linalg.det(u) ** 0.25
    m = dagger(MAGIC) @ (u / root) @ MAGIC

    eigenvalues, o = eig_unitary_symmetric(m.T @ m)
    if np.linalg.det(o) < 0:
        o[:, 0] = -o[:, 0]
    d = np.sqrt(eigenvalues)
    if np.prod(d).real < 0:
        d[0] = -d[0]
    o_left = m @ o @ np.diag(1 / d)
    if np.abs(o_left.imag).max() > RECONSTRUCTION_ATOL:
        raise DecompositionError(f"left factor is not real (max imag {np.abs(o_left.imag).max():.3e})")
    o_left = o_left.real

    k_left = MAGIC @ o_left @ dagger(MAGIC)
    k_right = MAGIC @ o.T @ dagger(MAGIC)

    theta = np.angle(d)
    g = theta.sum() / 4
    lam = theta - g
    alpha = (lam[0] + lam[1] - lam[2] - lam[3]) / 4
    beta = (-lam[0] + lam[1] - lam[2] + lam[3]) / 4
    gamma = (lam[0] - lam[1] - lam[2] + lam[3]) / 4

    form = canonicalize(alpha, beta, gamma)
    a1, a2, phase_l = kron_factor(k_left)
    b1, b2, phase_r = kron_factor(k_right)
    decomposition = KakDecomposition(
        *form.triple,
        k1=a1 @ form.left[0],
        k2=a2 @ form.left[1],
        k3=form.right[0] @ b1,
        k4=form.right[1] @ b2,
        global_phase=complex(root * np.exp(1j * g) * form.phase * phase_l * phase_r),
    )
    error = np.abs(decomposition.recompose() - u).max()
    if error > RECONSTRUCTION_ATOL:
        raise DecompositionError(f"KAK recomposition error {error:.3e}")
    return decomposition


def local_invariants(u) -> tuple[float, float, float]:
    return kak_decompose(u).triple


def locally_equivalent(a, b, atol: float = 1e-8) -> bool:
    return bool(np.allclose(local_invariants(a), local_invariants(b), atol=atol, rtol=0))


def weyl_grid(step: float, strict: bool = False) -> list[tuple[float, float, float]]:
    """Lattice points (iδ, jδ, kδ) of the closed Weyl chamber, π/4 ≥ α ≥ β ≥ |γ|.

    By default the identity and the mirror image (π/4, π/4, -π/4) of the SWAP
    vertex are left out; strict=True instead drops every γ < 0 point on the
    α = π/4 face.
    """
    n = round((math.pi / 4) / step)
    if n < 1 or abs(n * step - math.pi / 4) > 1e-9:
        raise ConfigError(f"grid step {step} does not divide π/4")
    points = []
    for i in range(n + 1):
        for j in range(i + 1):
            for k in range(-j, j + 1):
                if strict and i == n and k < 0:
                    continue
                if not strict and ((i, j, k) == (0, 0, 0) or (i, j, k) == (n, n, -n)):
                    continue
                points.append((i * step, j * step, k * step))
    return points
