"""Finite-precision discretization of the qubit's projective state space.

A ``PrecisionSpec`` fixes the number of bits ``m`` used to specify one state
and the grid construction:

  - ``REAL_ROTATION``: states (cos t, sin t) with the half-angle t on a
    uniform grid of step ``2**(-m/2)`` over [0, pi).  Projectively this is a
    circle of circumference pi, so the grid wraps around and its cardinality
    is ``ceil(pi * 2**(m/2))``.
  - ``GENERAL``: m/2-bit signed fixed-point values for Re(a1) and Im(a1) on
    [-1, 1) (two's-complement levels i / 2**(m/2 - 1)), with a0 fixed real
    positive by normalization.  Lattice points with |a1| >= 1 are rejected,
    which keeps index -> state injective; the realized cardinality is
    therefore reported by ``grid_cardinality`` rather than assumed to be 2**m.

The minimum resolvable Fubini-Study angle is ``phi_min = 2**(-m/2)``; the
alternative "sphere" resolution figure ``2**(-m) * pi`` is reported alongside
it but drives no bound (only phi_min reproduces the verification success
bound ``1 - 2**(-m)``).

Quantization is exact nearest-neighbor under the Fubini-Study metric, with
ties broken toward the lower index.  In GENERAL mode this is a full scan of
the realized lattice (the metric contracts tangentially near |a1| = 1, so
no local search is safe); cost grows as 2**m and stays practical for the
precisions the protocols use (m <= ~24).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError
from .qmath import ATOL_GATE, PureQubit
from .rng import as_rng


class GridMode(enum.Enum):
    REAL_ROTATION = "real_rotation"
    GENERAL = "general"


@dataclass(frozen=True)
class PrecisionSpec:
    """Total preparation precision in bits, plus the grid construction."""

    m: int
    mode: GridMode = GridMode.REAL_ROTATION

    def __post_init__(self):
        if not isinstance(self.m, int) or self.m < 2:
            raise ValidationError(f"precision m must be an integer >= 2, got {self.m!r}")
        if self.mode is GridMode.GENERAL and self.m % 2 != 0:
            raise ValidationError(
                f"GENERAL mode splits m into m/2 real + m/2 imaginary bits; m={self.m} is odd"
            )

    @property
    def phi_min(self) -> float:
        return 2.0 ** (-self.m / 2.0)


@dataclass(frozen=True)
class ResolutionReport:
    """Resolution geometry for one precision: phi_min drives every bound."""

    phi_min: float
    sphere_size: float
    overlap_bound: float


@dataclass(frozen=True)
class GridPoint:
    """One resolvable state: a precision spec plus integer grid indices."""

    spec: PrecisionSpec
    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        object.__setattr__(self, "indices", idx)
        if self.spec.mode is GridMode.REAL_ROTATION:
            if len(idx) != 1:
                raise ValidationError("REAL_ROTATION grid points have exactly 1 index")
            (k,) = idx
            if not 0 <= k < grid_cardinality(self.spec):
                raise ValidationError(f"index {k} outside grid of size {grid_cardinality(self.spec)}")
        else:
            if len(idx) != 2:
                raise ValidationError("GENERAL grid points have exactly 2 indices")
            half = _half_levels(self.spec)
            i, j = idx
            if not (-half <= i < half and -half <= j < half):
                raise ValidationError(f"indices {idx} outside the {self.spec.m}-bit lattice")
            if i * i + j * j >= half * half:
                raise ValidationError(f"indices {idx} give |a1| >= 1 (off the state space)")

    def to_json(self) -> dict:
        return {"mode": self.spec.mode.value, "m": self.spec.m, "indices": list(self.indices)}

    @classmethod
    def from_json(cls, data: dict) -> "GridPoint":
        spec = PrecisionSpec(int(data["m"]), GridMode(data["mode"]))
        return cls(spec, tuple(data["indices"]))


def _half_levels(spec: PrecisionSpec) -> int:
    """2**(m/2 - 1): lattice indices run over [-half, half) per axis."""
    return 1 << (spec.m // 2 - 1)


# ---------------------------------------------------------------------------
# Grid geometry
# ---------------------------------------------------------------------------

def grid_cardinality(spec: PrecisionSpec) -> int:
    """Number of distinct states the grid realizes."""
    if spec.mode is GridMode.REAL_ROTATION:
        return math.ceil(math.pi * 2.0 ** (spec.m / 2.0))
    half = _half_levels(spec)
    r2 = half * half
    total = 0
    for i in range(-half, half):
        rem = r2 - i * i - 1
        if rem >= 0:
            total += 2 * math.isqrt(rem) + 1
    return total


def prep_info(D: int, m: int) -> int:
    """Preparation entropy of the uniform resolvable ensemble: (D - 1) * m bits."""
    if not isinstance(D, int) or D < 2:
        raise ValidationError(f"Hilbert space dimension must be an integer >= 2, got {D!r}")
    if not isinstance(m, int) or m < 0:
        raise ValidationError(f"precision must be a non-negative integer, got {m!r}")
    return (D - 1) * m


def resolution(spec: PrecisionSpec) -> ResolutionReport:
    """Resolution constants at this precision."""
    return ResolutionReport(
        phi_min=2.0 ** (-spec.m / 2.0),
        sphere_size=2.0 ** (-spec.m) * math.pi,
        overlap_bound=1.0 - 2.0 ** (-spec.m),
    )


def ensemble_entropy_bits(spec: PrecisionSpec) -> float:
    """Shannon entropy (bits) of the uniform ensemble over the realized grid."""
    return math.log2(grid_cardinality(spec))


# ---------------------------------------------------------------------------
# Dequantize / quantize
# ---------------------------------------------------------------------------

def dequantize(g: GridPoint) -> PureQubit:
    """The normalized state a grid point stands for."""
    if g.spec.mode is GridMode.REAL_ROTATION:
        t = g.indices[0] * g.spec.phi_min
        return PureQubit(math.cos(t), math.sin(t))
    half = _half_levels(g.spec)
    x = g.indices[0] / half
    y = g.indices[1] / half
    a0 = math.sqrt(max(0.0, 1.0 - (x * x + y * y)))
    return PureQubit(a0, complex(x, y))


def _real_half_angle(s: PureQubit) -> float:
    """Canonical half-angle in [0, pi) for a state on the real circle.

    Raises DomainError if the state is not real up to a global phase.
    """
    a0, a1 = s.a0, s.a1
    if abs((a0.conjugate() * a1).imag) > ATOL_GATE:
        raise DomainError(
            "REAL_ROTATION grid requires a state with real amplitudes up to global phase"
        )
    mag1 = abs(a1)
    if mag1 == 0.0:
        return 0.0
    # Phase-fix so a1 > 0; a0 then lands on the real axis (up to the gate tol).
    re0 = (a0 * a1.conjugate()).real / mag1
    t = math.atan2(mag1, re0)
    return 0.0 if t >= math.pi else t


def _circle_distance(t1: float, t2: float) -> float:
    """Fubini-Study distance between real-circle half-angles (period pi)."""
    d = abs(t1 - t2) % math.pi
    return min(d, math.pi - d)


def quantize(s: PureQubit, spec: PrecisionSpec) -> GridPoint:
    """Nearest grid point under the Fubini-Study metric (ties: lower index)."""
    if spec.mode is GridMode.REAL_ROTATION:
        t = _real_half_angle(s)
        cardinality = grid_cardinality(spec)
        k0 = int(t / spec.phi_min) % cardinality
        best_k, best_d = None, None
        for k in (k0, (k0 + 1) % cardinality):
            d = _circle_distance(t, k * spec.phi_min)
            if best_d is None or d < best_d or (d == best_d and k < best_k):
                best_k, best_d = k, d
        return GridPoint(spec, (best_k,))

    # GENERAL: full scan of the lattice, row by row, tracking max overlap.
    half = _half_levels(spec)
    r2 = half * half
    a0s, a1s = s.a0, s.a1
    best: tuple[float, int, int] | None = None
    for i in range(-half, half):
        rem = r2 - i * i - 1
        if rem < 0:
            continue
        jmax = math.isqrt(rem)
        j = np.arange(-jmax, jmax + 1)
        x = i / half
        y = j / half
        a0g = np.sqrt(np.maximum(0.0, 1.0 - (x * x + y * y)))
        # |<g|s>|^2 with a0g real: |a0g * a0s + (x - i y) * a1s|^2
        ov = np.abs(a0g * a0s + (x - 1j * y) * a1s) ** 2
        at = int(np.argmax(ov))
        val = float(ov[at])
        if best is None or val > best[0]:
            best = (val, i, int(j[at]))
    assert best is not None
    return GridPoint(spec, (best[1], best[2]))


def truncate(g: GridPoint, n: int) -> GridPoint:
    """Drop the last n bits: the containing cell of the (m - n)-bit grid."""
    m = g.spec.m
    if not isinstance(n, int) or n < 0 or n >= m:
        raise ValidationError(f"truncated bits must satisfy 0 <= n < m, got n={n!r}, m={m}")
    if n == 0:
        return g
    coarse = PrecisionSpec(m - n, g.spec.mode)  # raises if m - n < 2 or odd in GENERAL
    return quantize(dequantize(g), coarse)


# ---------------------------------------------------------------------------
# Ensembles
# ---------------------------------------------------------------------------

def uniform_ensemble(
    spec: PrecisionSpec, size: int, rng_seed: np.random.Generator | int
) -> list[GridPoint]:
    """i.i.d. uniform draws over the realized grid, deterministic per seed."""
    if size < 0:
        raise ValidationError(f"ensemble size must be >= 0, got {size}")
    if size == 0:
        return []
    rng = as_rng(rng_seed)
    if spec.mode is GridMode.REAL_ROTATION:
        ks = rng.integers(0, grid_cardinality(spec), size=size)
        return [GridPoint(spec, (int(k),)) for k in ks]

    half = _half_levels(spec)
    r2 = half * half
    out: list[GridPoint] = []
    while len(out) < size:
        need = size - len(out)
        # Rejection sampling over the square keeps draws uniform on the disk.
        draws = rng.integers(-half, half, size=(2 * need + 8, 2))
        for i, j in draws:
            if i * i + j * j < r2:
                out.append(GridPoint(spec, (int(i), int(j))))
                if len(out) == size:
                    break
    return out
