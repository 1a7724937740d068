"""Dense complex linear algebra for one- and two-qubit pure states.

Everything here is a small immutable value backed by a read-only
``complex128`` ndarray: qubit state vectors, 2x2 operators, two-qubit joint
states and 2x2 density operators.  Operations are pure functions.

Conventions:
  - basis order |up>, |down> for a qubit; |uu>, |ud>, |du>, |dd> for a pair,
    first slot Alice, second slot Bob;
  - global phase is never canonicalized: all state comparisons go through
    ``fidelity`` / ``fs_angle``, which are phase-insensitive;
  - entropies are in bits (log base 2);
  - eigenvalues of 2x2 Hermitian matrices are computed in closed form
    (trace/determinant), never iteratively.

Tolerance budget: ``ATOL_ALGEBRA`` (1e-12) for algebraic identities enforced
by constructors, ``ATOL_GATE`` (1e-9) for validation gates on user inputs.
"""
from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from .errors import ValidationError

ATOL_ALGEBRA = 1e-12
ATOL_GATE = 1e-9


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.complex128)
    out.setflags(write=False)
    return out


def _require_finite(arr: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(arr.view(np.float64))):
        raise ValidationError(f"{what} contains NaN/Inf amplitudes")


# ---------------------------------------------------------------------------
# State and operator types
# ---------------------------------------------------------------------------

class PureQubit:
    """Normalized two-amplitude state vector a0|up> + a1|down>.

    Amplitudes are stored exactly as given (no renormalization, no phase
    canonicalization); construction rejects norm drift beyond 1e-9.
    """

    __slots__ = ("vec",)

    def __init__(self, a0: complex, a1: complex):
        vec = _frozen([a0, a1])
        _require_finite(vec, "PureQubit")
        norm2 = float(np.sum(np.abs(vec) ** 2))
        if abs(norm2 - 1.0) > ATOL_GATE:
            raise ValidationError(
                f"PureQubit not normalized: |a0|^2+|a1|^2 = {norm2!r}"
            )
        self.vec = vec

    @property
    def a0(self) -> complex:
        return complex(self.vec[0])

    @property
    def a1(self) -> complex:
        return complex(self.vec[1])

    def __repr__(self) -> str:
        return f"PureQubit({self.a0!r}, {self.a1!r})"


UP = PureQubit(1.0, 0.0)
DOWN = PureQubit(0.0, 1.0)


class Operator2:
    """2x2 complex operator.

    Use the checked constructors: ``observable`` enforces Hermiticity and
    ``evolution`` enforces unitarity, both to 1e-12.  The bare constructor
    only checks finiteness and is meant for internally derived matrices.
    """

    __slots__ = ("mat",)

    def __init__(self, mat: Iterable):
        m = _frozen(np.asarray(mat, dtype=np.complex128).reshape(2, 2))
        _require_finite(m, "Operator2")
        self.mat = m

    @classmethod
    def observable(cls, mat: Iterable) -> "Operator2":
        op = cls(mat)
        if not op.is_hermitian(ATOL_ALGEBRA):
            raise ValidationError("observable constructor requires a Hermitian matrix")
        return op

    @classmethod
    def evolution(cls, mat: Iterable) -> "Operator2":
        op = cls(mat)
        if not op.is_unitary(ATOL_ALGEBRA):
            raise ValidationError("evolution constructor requires a unitary matrix")
        return op

    def is_hermitian(self, atol: float = ATOL_GATE) -> bool:
        return bool(np.max(np.abs(self.mat - self.mat.conj().T)) <= atol)

    def is_unitary(self, atol: float = ATOL_GATE) -> bool:
        return bool(np.max(np.abs(self.mat.conj().T @ self.mat - np.eye(2))) <= atol)

    def __matmul__(self, other: "Operator2") -> "Operator2":
        return Operator2(self.mat @ other.mat)

    def __repr__(self) -> str:
        return f"Operator2({self.mat.tolist()!r})"


IDENTITY = Operator2.evolution(np.eye(2))
SIGMA_X = Operator2.observable([[0, 1], [1, 0]])
SIGMA_Y = Operator2.observable([[0, -1j], [1j, 0]])
SIGMA_Z = Operator2.observable([[1, 0], [0, -1]])


class TwoQubitState:
    """Joint Alice-Bob pure state, amplitudes in |uu>,|ud>,|du>,|dd> order."""

    __slots__ = ("vec",)

    def __init__(self, c00: complex, c01: complex, c10: complex, c11: complex):
        vec = _frozen([c00, c01, c10, c11])
        _require_finite(vec, "TwoQubitState")
        norm2 = float(np.sum(np.abs(vec) ** 2))
        if abs(norm2 - 1.0) > ATOL_GATE:
            raise ValidationError(f"TwoQubitState not normalized: sum |c|^2 = {norm2!r}")
        self.vec = vec

    @classmethod
    def from_vector(cls, vec: Iterable) -> "TwoQubitState":
        v = np.asarray(list(vec), dtype=np.complex128)
        return cls(v[0], v[1], v[2], v[3])

    @classmethod
    def product(cls, alice: PureQubit, bob: PureQubit) -> "TwoQubitState":
        return cls.from_vector(np.kron(alice.vec, bob.vec))

    def __repr__(self) -> str:
        return f"TwoQubitState({self.vec.tolist()!r})"


def _hermitian_eigvals(mat: np.ndarray) -> tuple[float, float]:
    """Closed-form eigenvalues of a 2x2 Hermitian matrix, ascending."""
    a = float(mat[0, 0].real)
    d = float(mat[1, 1].real)
    half_diff = (a - d) / 2.0
    radius = math.hypot(half_diff, abs(mat[0, 1]))
    mean = (a + d) / 2.0
    return mean - radius, mean + radius


class DensityOp:
    """2x2 density operator: Hermitian, unit trace, positive semidefinite."""

    __slots__ = ("mat",)

    def __init__(self, mat: Iterable):
        m = _frozen(np.asarray(mat, dtype=np.complex128).reshape(2, 2))
        _require_finite(m, "DensityOp")
        if np.max(np.abs(m - m.conj().T)) > ATOL_ALGEBRA:
            raise ValidationError("DensityOp must be Hermitian")
        if abs(np.trace(m).real - 1.0) > ATOL_ALGEBRA or abs(np.trace(m).imag) > ATOL_ALGEBRA:
            raise ValidationError("DensityOp must have unit trace")
        lo, _ = _hermitian_eigvals(m)
        if lo < -ATOL_ALGEBRA:
            raise ValidationError(f"DensityOp has negative eigenvalue {lo!r}")
        self.mat = m

    @classmethod
    def pure(cls, s: PureQubit) -> "DensityOp":
        return cls(np.outer(s.vec, s.vec.conj()))

    def eigenvalues(self) -> tuple[float, float]:
        return _hermitian_eigvals(self.mat)

    def __repr__(self) -> str:
        return f"DensityOp({self.mat.tolist()!r})"


MAXIMALLY_MIXED = DensityOp(np.eye(2) / 2.0)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def _check_normalized(s: PureQubit, name: str) -> None:
    drift = abs(float(np.sum(np.abs(s.vec) ** 2)) - 1.0)
    if drift > ATOL_GATE:
        raise ValidationError(f"{name}: state normalization drift {drift!r} exceeds 1e-9")


def overlap(x: PureQubit, y: PureQubit) -> complex:
    """Inner product <x|y>."""
    return complex(np.vdot(x.vec, y.vec))


def fidelity(x: PureQubit, y: PureQubit) -> float:
    """|<x|y>|^2: symmetric, global-phase invariant, in [0, 1]."""
    _check_normalized(x, "fidelity")
    _check_normalized(y, "fidelity")
    f = abs(overlap(x, y)) ** 2
    return min(1.0, f)


def fs_angle(x: PureQubit, y: PureQubit) -> float:
    """Fubini-Study angle arccos |<x|y>| on projective space, in [0, pi/2]."""
    _check_normalized(x, "fs_angle")
    _check_normalized(y, "fs_angle")
    return math.acos(min(1.0, abs(overlap(x, y))))


def partial_trace_A(s: TwoQubitState) -> DensityOp:
    """Bob's reduced density operator tr_A |s><s|."""
    c = s.vec.reshape(2, 2)  # index [alice, bob]
    rho_b = c.T @ c.conj()   # rho_B[i,j] = sum_a c[a,i] conj(c[a,j])
    return DensityOp(rho_b)


def von_neumann_entropy(r: DensityOp) -> float:
    """S(rho) = -sum_i lambda_i log2 lambda_i, with 0 log 0 = 0."""
    total = 0.0
    for lam in r.eigenvalues():
        if lam < -ATOL_ALGEBRA:
            raise ValidationError(f"negative eigenvalue {lam!r} in entropy input")
        if lam > 0.0:
            total -= lam * math.log2(lam)
    return total


def apply(op: Operator2, s: PureQubit) -> PureQubit:
    """Apply a unitary to a state; preserves normalization to 1e-12."""
    if not op.is_unitary(ATOL_GATE):
        raise ValidationError("apply requires a unitary operator")
    out = op.mat @ s.vec
    return PureQubit(out[0], out[1])


def rotation_y(angle: float) -> Operator2:
    """R_y(angle): rotates |up> to (cos(angle/2), sin(angle/2))."""
    if not math.isfinite(angle):
        raise ValidationError("rotation angle must be finite")
    c, s = math.cos(angle / 2.0), math.sin(angle / 2.0)
    return Operator2.evolution([[c, -s], [s, c]])
