"""Verification of transmitted states and the precision success bound.

Bob checks a claimed preparation (alpha, beta) = (cos t, sin t) by measuring
the +-1-valued observable

    M(theta) = [[cos theta, sin theta], [sin theta, -cos theta]],

whose +1 eigenvector is exactly the claimed state at theta = 2 arccos(alpha).
Equivalently he rotates through -theta and measures M(0) = sigma_z; both
procedures have identical Born statistics.

When preparation and verification settings disagree by the minimum
resolvable angle phi = 2**(-m/2) (the worst case at m-bit knowledge), the
success probability is cos^2(phi) > 1 - 2**(-m).  Ignoring the last n bits
coarsens the resolution to 2**(-(m-n)/2) and the failure rate grows by a
factor close to 2**n; ``truncation_experiment`` measures exactly that, both
in closed form and by Monte Carlo over full teleportation runs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

from . import _kernels
from .errors import ValidationError
from .precision import GridMode, GridPoint, PrecisionSpec, grid_cardinality
from .protocol import CORRECTIONS, EprResource, bell_branches, prepare
from .qmath import Operator2, PureQubit, apply, rotation_y
from .rng import as_rng

VERIFY_CSV_COLUMNS = ("m", "n", "trials", "successes", "p_hat", "bound", "passed")

DEFAULT_SIGNIFICANCE = 1e-3


@dataclass(frozen=True)
class VerificationOp:
    """M(theta) with its +1 eigenvector (cos theta/2, sin theta/2)."""

    theta: float
    matrix: Operator2

    @classmethod
    def from_theta(cls, theta: float) -> "VerificationOp":
        c, s = math.cos(theta), math.sin(theta)
        return cls(theta=theta, matrix=Operator2.observable([[c, s], [s, -c]]))

    @property
    def plus_eigenvector(self) -> PureQubit:
        return PureQubit(math.cos(self.theta / 2.0), math.sin(self.theta / 2.0))


def verification_op(alpha: float) -> VerificationOp:
    """Observable for the claimed state alpha|up> + sqrt(1-alpha^2)|down>."""
    if not 0.0 <= alpha <= 1.0:
        raise ValidationError(f"alpha must lie in [0, 1], got {alpha!r}")
    return VerificationOp.from_theta(2.0 * math.acos(alpha))


@dataclass(frozen=True)
class VerificationReport:
    """Outcome tally of a verification experiment against the success bound.

    ``passed`` is a one-sided exact binomial decision: the data are accepted
    as consistent with success probability >= bound unless P(X <= successes)
    under p = bound falls below the significance.  Analytic sentinels
    (trials = 0) carry the exact Born probability in ``p_hat`` and compare
    it to the bound directly.
    """

    m: int
    n: int
    trials: int
    successes: int
    p_hat: float
    bound: float
    passed: bool
    significance: float = DEFAULT_SIGNIFICANCE

    def to_json(self) -> dict:
        return {
            "kind": "verification",
            "m": self.m,
            "n": self.n,
            "trials": self.trials,
            "successes": self.successes,
            "p_hat": self.p_hat,
            "bound": self.bound,
            "passed": self.passed,
            "significance": self.significance,
        }

    def csv_row(self) -> tuple:
        return (self.m, self.n, self.trials, self.successes, self.p_hat, self.bound, self.passed)


def measure_verify(
    state: PureQubit, op: VerificationOp, rng: np.random.Generator | int
) -> int:
    """Single projective measurement of M(theta): returns +1 or -1."""
    p_plus = abs(np.vdot(op.plus_eigenvector.vec, state.vec)) ** 2
    return 1 if float(as_rng(rng).random()) < p_plus else -1


def rotate_then_measure(
    state: PureQubit, theta: float, rng: np.random.Generator | int
) -> int:
    """Rotate through -theta, then measure M(0); same statistics as above."""
    rotated = apply(rotation_y(-theta), state)
    p_plus = abs(rotated.a0) ** 2
    return 1 if float(as_rng(rng).random()) < p_plus else -1


def success_bound(m: int, n: int = 0) -> float:
    """Verification success bound 1 - 2**-(m-n) at m bits with n ignored."""
    if not isinstance(m, int) or m < 1:
        raise ValidationError(f"precision m must be a positive integer, got {m!r}")
    if not isinstance(n, int) or n < 0 or n >= m:
        raise ValidationError(f"truncated bits must satisfy 0 <= n < m, got {n!r}")
    return 1.0 - 2.0 ** (-(m - n))


def _binomial_pass(successes: int, trials: int, bound: float, significance: float) -> bool:
    """Accept unless the one-sided exact binomial test rejects p >= bound."""
    return bool(binom.cdf(successes, trials, bound) >= significance)


def _worst_case_point(spec: PrecisionSpec) -> GridPoint:
    if spec.mode is not GridMode.REAL_ROTATION:
        raise ValidationError(
            "verification experiments run on the REAL_ROTATION grid "
            "(GENERAL-mode states verify through the same machinery after basis alignment)"
        )
    return GridPoint(spec, (grid_cardinality(spec) // 3,))


def verification_experiment(
    spec: PrecisionSpec,
    trials: int,
    rng: np.random.Generator | int = 0,
    truncated_bits: int = 0,
    significance: float = DEFAULT_SIGNIFICANCE,
) -> VerificationReport:
    """Teleport-then-verify at the worst-case m-bit setting mismatch.

    The state is prepared at a grid point; the verification operator targets
    the setting one resolution unit 2**(-(m-n)/2) away, the worst case for
    knowledge carrying m - n significant bits.  Each trial runs a full QT
    (Bell outcome + correction) before the verification measurement.
    ``trials = 0`` returns the analytic report with the exact Born success
    probability cos^2 of the mismatch.
    """
    m = spec.m
    bound = success_bound(m, truncated_bits)
    mismatch = 2.0 ** (-(m - truncated_bits) / 2.0)
    point = _worst_case_point(spec)
    t_prepared = point.indices[0] * spec.phi_min

    if trials == 0:
        p_exact = math.cos(mismatch) ** 2
        return VerificationReport(
            m=m, n=truncated_bits, trials=0, successes=0,
            p_hat=p_exact, bound=bound, passed=p_exact > bound,
            significance=significance,
        )

    op = VerificationOp.from_theta(2.0 * (t_prepared + mismatch))
    state = prepare(point)
    probs, conditionals = bell_branches(state, EprResource.fresh().joint)
    plus = op.plus_eigenvector.vec
    p_succ = np.empty(4)
    for k, cond in enumerate(conditionals):
        corrected = apply(CORRECTIONS[k], cond)
        p_succ[k] = abs(np.vdot(plus, corrected.vec)) ** 2
    cum = np.cumsum(probs)
    uniforms = as_rng(rng).random(2 * trials)
    _, successes = _kernels.teleport_verify(uniforms, cum, p_succ)
    return VerificationReport(
        m=m, n=truncated_bits, trials=trials, successes=int(successes),
        p_hat=successes / trials, bound=bound,
        passed=_binomial_pass(int(successes), trials, bound, significance),
        significance=significance,
    )


def truncation_experiment(
    spec: PrecisionSpec,
    n: int,
    trials: int,
    rng: np.random.Generator | int = 0,
    average: bool = False,
) -> tuple[VerificationReport, VerificationReport, float]:
    """Failure amplification when the last n bits are ignored.

    Returns the full-precision report, the n-bit-truncated report, and the
    failure ratio (1 - p_trunc) / (1 - p_full), which approaches 2**n in the
    small-angle regime.  ``average=True`` replaces the worst-case truncated
    mismatch with a uniform average over the coarse cell's member offsets
    (diluting the 2**n factor); the default worst case is what the
    acceptance bound is about.
    """
    if not isinstance(n, int) or n < 0 or n >= spec.m:
        raise ValidationError(f"need 0 <= n < m, got n={n!r} at m={spec.m}")
    rng = as_rng(rng)
    report_full = verification_experiment(spec, trials, rng, truncated_bits=0)
    if average and n > 0:
        report_trunc = _average_cell_report(spec, n, trials, rng)
    else:
        report_trunc = verification_experiment(spec, trials, rng, truncated_bits=n)
    failure_full = 1.0 - report_full.p_hat
    failure_trunc = 1.0 - report_trunc.p_hat
    ratio = math.inf if failure_full == 0.0 else failure_trunc / failure_full
    return report_full, report_trunc, ratio


def _average_cell_report(
    spec: PrecisionSpec, n: int, trials: int, rng: np.random.Generator
) -> VerificationReport:
    """Truncated verification averaged uniformly over coarse-cell offsets."""
    m = spec.m
    phi = spec.phi_min
    width = max(1, round(2.0 ** (n / 2.0)))
    bound = success_bound(m, n)
    offsets = np.arange(width)
    p_by_offset = np.cos(offsets * phi) ** 2

    if trials == 0:
        p_avg = float(np.mean(p_by_offset))
        return VerificationReport(
            m=m, n=n, trials=0, successes=0, p_hat=p_avg,
            bound=bound, passed=p_avg > bound,
        )

    draws = rng.integers(0, width, size=trials)
    successes = 0
    for d in range(width):
        n_d = int(np.sum(draws == d))
        if n_d == 0:
            continue
        uniforms = rng.random(n_d)
        successes += _kernels.count_successes(uniforms, float(p_by_offset[d]))
    return VerificationReport(
        m=m, n=n, trials=trials, successes=successes, p_hat=successes / trials,
        bound=bound, passed=_binomial_pass(successes, trials, bound, DEFAULT_SIGNIFICANCE),
    )
