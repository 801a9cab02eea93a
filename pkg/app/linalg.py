import logging

import numpy as np

from app.errors import DecompositionError, DimensionError, NotUnitaryError

logger = logging.getLogger(__name__)

UNITARY_ATOL = 1e-10
RECONSTRUCTION_ATOL = 1e-9
CLUSTER_GAP = 1e-8

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}

# irrational mixing angles for the real/imaginary split of symmetric unitaries
_MIXING_ANGLES = (0.4142135623730951, 1.2247448713915890, 2.6457513110645907, 0.7071067811865476)


def as_matrix(m, shape: tuple[int, int] | None = None) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or (shape is not None and a.shape != shape):
        raise DimensionError(f"expected a matrix of shape {shape}, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DimensionError("matrix has non-finite entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(m).T


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a, (2, 2)), as_matrix(b, (2, 2)))


def lift(op: np.ndarray, qubit: int) -> np.ndarray:
    """Embed a single-qubit operator; qubit 0 is the first Kronecker factor."""
    if qubit == 0:
        return kron(op, I2)
    if qubit == 1:
        return kron(I2, op)
    raise DimensionError(f"qubit index must be 0 or 1, got {qubit}")


def pauli_product_exp(coeff: float, pauli_pair: str) -> np.ndarray:
    """exp(i c P⊗P) = cos(c) I + i sin(c) P⊗P, exact since (P⊗P)^2 = I."""
    if len(pauli_pair) != 2 or pauli_pair[0] != pauli_pair[1] or pauli_pair[0] not in "XYZ":
        raise DimensionError(f"unsupported Pauli pair {pauli_pair!r}")
    p = PAULI[pauli_pair[0]]
    return np.cos(coeff) * np.eye(4, dtype=complex) + 1j * np.sin(coeff) * np.kron(p, p)


def is_unitary(m: np.ndarray, atol: float = UNITARY_ATOL) -> bool:
    return np.allclose(dagger(m) @ m, np.eye(m.shape[0]), atol=atol, rtol=0)


def check_unitary(m, dim: int = 4) -> np.ndarray:
    a = as_matrix(m, (dim, dim))
    if not is_unitary(a):
        err = np.abs(dagger(a) @ a - np.eye(dim)).max()
        raise NotUnitaryError(f"matrix is not unitary (max |U†U - I| = {err:.3e})")
    return a


def phase_distance(a: np.ndarray, b: np.ndarray) -> float:
    """1 - |Tr(A†B)|/d, zero iff the unitaries agree up to global phase."""
    d = a.shape[0]
    return float(1.0 - abs(np.trace(dagger(a) @ b)) / d)


def special_unitary(m: np.ndarray) -> np.ndarray:
    d = m.shape[0]
    return m / np.linalg.det(m) ** (1.0 / d)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def _rearrange(m: np.ndarray) -> np.ndarray:
    # R[(i,j),(k,l)] = m[2i+k, 2j+l], rank one iff m is a tensor product
    return m.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)


def is_product(m: np.ndarray, atol: float = RECONSTRUCTION_ATOL) -> bool:
    s = np.linalg.svd(_rearrange(as_matrix(m, (4, 4))), compute_uv=False)
    return bool(s[1] <= atol * max(s[0], 1.0))


def kron_factor(m: np.ndarray, atol: float = RECONSTRUCTION_ATOL) -> tuple[np.ndarray, np.ndarray, complex]:
    """Split m = phase * kron(a, b) with det(a) = det(b) = 1."""
    m = as_matrix(m, (4, 4))
    u, s, vh = np.linalg.svd(_rearrange(m))
    if s[1] > atol * max(s[0], 1.0):
        raise DecompositionError(f"matrix is not a tensor product (second singular value {s[1]:.3e})")
    a = (u[:, 0] * np.sqrt(s[0])).reshape(2, 2)
    b = (vh[0, :] * np.sqrt(s[0])).reshape(2, 2)
    a = a / np.sqrt(np.linalg.det(a))
    b = b / np.sqrt(np.linalg.det(b))
    phase = np.trace(dagger(np.kron(a, b)) @ m) / 4
    return a, b, complex(phase)


def _simultaneous_basis(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(p)
    n = len(vals)
    blocks = []
    start = 0
    for i in range(1, n + 1):
        if i == n or vals[i] - vals[i - 1] > CLUSTER_GAP:
            block = vecs[:, start:i]
            if block.shape[1] > 1:
                _, sub = np.linalg.eigh(block.T @ q @ block)
                block = block @ sub
            blocks.append(block)
            start = i
    return np.hstack(blocks)


def eig_unitary_symmetric(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and a real orthogonal eigenbasis O of a symmetric unitary, m = O diag(λ) Oᵀ.

    The real and imaginary parts of such a matrix are commuting real symmetric
    matrices, so a generic real combination of them is diagonalized and any
    remaining degenerate clusters are split with the orthogonal combination.
    """
    m = as_matrix(m, (4, 4))
    if not np.allclose(m, m.T, atol=UNITARY_ATOL, rtol=0):
        raise NotUnitaryError("matrix is not complex symmetric")
    check_unitary(m)
    re, im = m.real, m.imag
    residual = np.inf
    for t in _MIXING_ANGLES:
        c, s = np.cos(t), np.sin(t)
        o = _simultaneous_basis(c * re + s * im, -s * re + c * im)
        eigenvalues = np.diagonal(o.T @ m @ o).copy()
        eigenvalues /= np.abs(eigenvalues)
        residual = np.linalg.norm(o @ np.diag(eigenvalues) @ o.T - m)
        if residual < RECONSTRUCTION_ATOL:
            return eigenvalues, o
        logger.debug("mixing angle %.6f left residual %.3e, retrying", t, residual)
    raise DecompositionError(f"no real orthogonal eigenbasis found (residual {residual:.3e})")
