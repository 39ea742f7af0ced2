"""Dense complex linear algebra for small multi-qubit systems.

Everything here works on plain numpy arrays with big-endian qubit ordering:
basis index of |b0 b1 ... b(n-1)> is the integer with b0 as the most
significant bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

HERMITICITY_TOL = 1e-10
PSD_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def kron(*factors: np.ndarray) -> np.ndarray:
    """Kronecker product of any number of matrices or vectors, left to right."""
    if not factors:
        raise ValueError("kron needs at least one factor")
    out = np.asarray(factors[0], dtype=complex)
    for f in factors[1:]:
        out = np.kron(out, np.asarray(f, dtype=complex))
    return out


def dagger(m: np.ndarray) -> np.ndarray:
    return np.asarray(m).conj().T


def projector(v: np.ndarray) -> np.ndarray:
    """|v><v| for a 1-D state vector."""
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def is_hermitian(m: np.ndarray, tol: float = HERMITICITY_TOL) -> bool:
    m = np.asarray(m)
    return m.shape[0] == m.shape[1] and np.max(np.abs(m - m.conj().T)) <= tol


def num_qubits_of(dim: int) -> int:
    n = int(round(np.log2(dim)))
    if 2**n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


@dataclass(frozen=True)
class QubitLayout:
    """Assignment of qubit indices to parties.

    The assignment must be a partition of range(total_qubits): every index
    appears in exactly one party's tuple.
    """

    total_qubits: int
    parties: dict[str, tuple[int, ...]] = field(hash=False)

    def __post_init__(self):
        seen = sorted(q for qs in self.parties.values() for q in qs)
        if seen != list(range(self.total_qubits)):
            raise ValueError(
                f"party assignment {self.parties} is not a partition of "
                f"0..{self.total_qubits - 1}")

    def qubits_of(self, party: str) -> tuple[int, ...]:
        return self.parties[party]

    def complement(self, party: str) -> tuple[int, ...]:
        keep = set(self.parties[party])
        return tuple(q for q in range(self.total_qubits) if q not in keep)


#: Alice keeps qubit 0; pairs (1,2), (3,4), (5,6) travel to Bob, Charlie, David.
DEFAULT_LAYOUT = QubitLayout(
    total_qubits=7,
    parties={"alice": (0,), "bob": (1, 2), "charlie": (3, 4), "david": (5, 6)},
)


def partial_trace(rho: np.ndarray, traced_qubits, num_qubits: int | None = None) -> np.ndarray:
    """Trace out the given qubits of a multi-qubit density matrix.

    The remaining qubits keep their relative order. Implemented by index
    arithmetic on the reshaped (2,)*2n tensor rather than repeated two-qubit
    contractions, so it can be checked against a direct summation oracle.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {rho.shape}")
    n = num_qubits_of(rho.shape[0])
    if num_qubits is not None and num_qubits != n:
        raise ValueError(
            f"matrix of dimension {rho.shape[0]} does not hold {num_qubits} qubits")
    traced = sorted(set(traced_qubits))
    if traced and (traced[0] < 0 or traced[-1] >= n):
        raise ValueError(f"traced qubits {traced} out of range for {n} qubits")
    keep = [q for q in range(n) if q not in traced]

    t = rho.reshape((2,) * (2 * n))
    perm = keep + traced + [q + n for q in keep] + [q + n for q in traced]
    t = np.transpose(t, perm)
    dk, dt = 2 ** len(keep), 2 ** len(traced)
    t = t.reshape(dk, dt, dk, dt)
    return np.einsum("abcb->ac", t)


def hermitian_eigensystem(h: np.ndarray, tol: float = HERMITICITY_TOL):
    """Eigenvalues and eigenvectors of a Hermitian matrix, validated first."""
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h, tol):
        raise ValueError("matrix is not Hermitian within tolerance")
    return np.linalg.eigh((h + h.conj().T) / 2)


def min_eigenvalue(h: np.ndarray) -> float:
    w, _ = hermitian_eigensystem(h)
    return float(w[0])


def psd_sqrt(h: np.ndarray, tol: float = PSD_TOL) -> np.ndarray:
    """Hermitian PSD square root S of h with S @ S == h.

    Eigenvalues in [-tol, 0) are clamped to zero; anything below -tol is
    rejected as non-PSD.
    """
    w, v = hermitian_eigensystem(h)
    if w[0] < -tol:
        raise ValueError(f"matrix is not PSD: min eigenvalue {w[0]:.3e}")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T
