"""Teleportation and remote-state-preparation choreography.

Standard teleportation (QT): Alice Bell-measures the input qubit together
with her half of a shared singlet, sends Bob the 2-bit outcome, and Bob
applies the outcome-indexed Pauli.  Remote state preparation (RSP): Alice
measures her singlet half in the basis (eta, eta_perp) of the state she
wants Bob to hold, sends 1 bit, and Bob conditionally applies the fixed
correction for eta's family.

Conventions fixed here (any consistent convention passes the end-to-end
identity checks):
  - Bell outcomes are ordered (Phi+, Phi-, Psi+, Psi-) = 0..3, with Bob's
    corrections (sigma_y, sigma_x, sigma_z, identity) for the singlet
    resource;
  - QT message bits are (outcome >> 1, outcome & 1);
  - RSP message bit 0 means Alice projected onto eta itself (Bob must
    correct), bit 1 means eta_perp (Bob already holds eta).

Bob's conditional states carry arbitrary global phase; every contract here
is phase-insensitive through fidelity.  Measurement sampling is inverse-CDF
on exact Born probabilities computed from the amplitudes.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import ledger as _ledger
from .errors import DomainError, ProtocolOrderError, ValidationError
from .precision import GridPoint, dequantize
from .qmath import (
    IDENTITY,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    UP,
    DensityOp,
    Operator2,
    PureQubit,
    TwoQubitState,
    apply,
)
from .rng import as_rng

_SQRT_HALF = 1.0 / math.sqrt(2.0)

#: The pre-arranged reference state all preparation unitaries act on.
REFERENCE_STATE = UP


class Protocol(enum.Enum):
    QT = "QT"
    RSP = "RSP"


# Bell basis as 2x2 coefficient matrices over (Alice's input qubit, Alice's
# EPR half), in outcome order (Phi+, Phi-, Psi+, Psi-).
_BELL_BASIS = np.array(
    [
        [[1, 0], [0, 1]],
        [[1, 0], [0, -1]],
        [[0, 1], [1, 0]],
        [[0, 1], [-1, 0]],
    ],
    dtype=np.complex128,
) * _SQRT_HALF

#: Bob's correction per Bell outcome (singlet resource).
CORRECTIONS: tuple[Operator2, ...] = (SIGMA_Y, SIGMA_X, SIGMA_Z, IDENTITY)


class EprResource:
    """One shared entangled pair; consumed by exactly one protocol run."""

    __slots__ = ("joint", "_consumed")

    def __init__(self, joint: TwoQubitState | None = None):
        if joint is None:
            joint = TwoQubitState(0.0, _SQRT_HALF, -_SQRT_HALF, 0.0)
        else:
            singlet = np.array([0.0, _SQRT_HALF, -_SQRT_HALF, 0.0])
            if abs(abs(np.vdot(singlet, joint.vec)) ** 2 - 1.0) > 1e-12:
                raise ValidationError("EprResource joint state must be the singlet")
        self.joint = joint
        self._consumed = False

    @classmethod
    def fresh(cls) -> "EprResource":
        return cls()

    @classmethod
    def custom(cls, joint: TwoQubitState) -> "EprResource":
        """Arbitrary (e.g. product) resource for probes and tests."""
        obj = cls.__new__(cls)
        obj.joint = joint
        obj._consumed = False
        return obj

    @property
    def consumed(self) -> bool:
        return self._consumed

    def consume(self) -> None:
        if self._consumed:
            raise ProtocolOrderError("EPR pair already consumed by a previous run")
        self._consumed = True


@dataclass(frozen=True)
class ClassicalMessage:
    """The classical channel payload: 2 bits for QT, 1 bit for RSP."""

    protocol: Protocol
    bits: tuple[int, ...]

    def __post_init__(self):
        expected = 2 if self.protocol is Protocol.QT else 1
        if len(self.bits) != expected:
            raise ValidationError(
                f"{self.protocol.value} message needs {expected} bits, got {len(self.bits)}"
            )
        if any(b not in (0, 1) for b in self.bits):
            raise ValidationError("message bits must be 0 or 1")


@dataclass
class RunRecord:
    """Everything one protocol run produced, plus its information ledger."""

    protocol: Protocol
    target: PureQubit
    outcome: int | None = None
    message: ClassicalMessage | None = None
    bob_final: PureQubit | None = None
    prepared: GridPoint | None = None
    prep_bits: int | None = None
    ledger: "_ledger.LedgerRecord | None" = field(default=None)

    def to_json(self) -> dict:
        def amps(s: PureQubit | None):
            if s is None:
                return None
            return [[s.a0.real, s.a0.imag], [s.a1.real, s.a1.imag]]

        return {
            "protocol": self.protocol.value,
            "prepared": self.prepared.to_json() if self.prepared else None,
            "target": amps(self.target),
            "outcome": self.outcome,
            "message_bits": list(self.message.bits) if self.message else None,
            "bob_final": amps(self.bob_final),
            "ledger": self.ledger.to_json() if self.ledger else None,
        }


# ---------------------------------------------------------------------------
# Branch algebra (exact, shared by sampling and analytic paths)
# ---------------------------------------------------------------------------

def _inverse_cdf(u: float, probs: np.ndarray) -> int:
    idx = 0
    acc = probs[0]
    while idx < len(probs) - 1 and u >= acc:
        idx += 1
        acc += probs[idx]
    return idx


def bell_branches(
    state: PureQubit, joint: TwoQubitState
) -> tuple[np.ndarray, list[PureQubit | None]]:
    """Born probabilities and Bob's conditional state for all 4 Bell outcomes."""
    r = joint.vec.reshape(2, 2)  # [alice_half, bob]
    # T[i, a, b] = psi_i * r[a, b]; project (i, a) on each Bell state.
    amps = np.einsum("kia,iab->kb", _BELL_BASIS.conj(), state.vec[:, None, None] * r[None, :, :])
    probs = np.sum(np.abs(amps) ** 2, axis=1)
    conditionals: list[PureQubit | None] = []
    for k in range(4):
        p = float(probs[k])
        if p <= 0.0:
            conditionals.append(None)
        else:
            v = amps[k] / math.sqrt(p)
            conditionals.append(PureQubit(v[0], v[1]))
    return probs, conditionals


def rsp_branches(
    eta: PureQubit, joint: TwoQubitState
) -> tuple[np.ndarray, list[PureQubit | None]]:
    """Outcome probabilities and Bob's conditionals for RSP of ``eta``."""
    eta_perp = PureQubit(-eta.a1.conjugate(), eta.a0.conjugate())
    return _projective_branches((eta, eta_perp), joint)


def _projective_branches(
    basis: tuple[PureQubit, PureQubit], joint: TwoQubitState
) -> tuple[np.ndarray, list[PureQubit | None]]:
    """Alice measures her half in ``basis``; Bob's conditionals per outcome."""
    r = joint.vec.reshape(2, 2)
    probs = np.empty(2)
    conditionals: list[PureQubit | None] = []
    for o, chi in enumerate(basis):
        amp = chi.vec.conj() @ r  # (<chi| ⊗ I) |joint>
        p = float(np.sum(np.abs(amp) ** 2))
        probs[o] = p
        if p <= 0.0:
            conditionals.append(None)
        else:
            v = amp / math.sqrt(p)
            conditionals.append(PureQubit(v[0], v[1]))
    return probs, conditionals


# ---------------------------------------------------------------------------
# Protocol operations
# ---------------------------------------------------------------------------

def preparation_unitary(g: GridPoint) -> Operator2:
    """The unitary Charlie applies to the reference state to realize ``g``.

    For the real-rotation grid this is exactly R_y(theta) with theta twice
    the grid half-angle.
    """
    s = dequantize(g)
    return Operator2.evolution(
        [[s.a0, -s.a1.conjugate()], [s.a1, s.a0.conjugate()]]
    )


def prepare(charlie_knowledge: GridPoint) -> PureQubit:
    """Charlie's preparation: apply the grid point's unitary to |ref>."""
    return apply(preparation_unitary(charlie_knowledge), REFERENCE_STATE)


def bell_measure(
    state: PureQubit, resource: EprResource, rng: np.random.Generator | int
) -> tuple[int, PureQubit]:
    """Alice's Bell measurement; returns the outcome and Bob's conditional."""
    resource.consume()
    rng = as_rng(rng)
    probs, conditionals = bell_branches(state, resource.joint)
    outcome = _inverse_cdf(float(rng.random()), probs)
    bob = conditionals[outcome]
    assert bob is not None  # zero-probability branches are never drawn
    return outcome, bob


def qt_correct(bob_conditional: PureQubit, message: ClassicalMessage) -> PureQubit:
    """Bob's Pauli counter-rotation indexed by the 2-bit message."""
    if message.protocol is not Protocol.QT:
        raise ValidationError("qt_correct requires a QT message")
    outcome = 2 * message.bits[0] + message.bits[1]
    return apply(CORRECTIONS[outcome], bob_conditional)


def qt_run(
    charlie_knowledge: GridPoint,
    resource: EprResource,
    rng: np.random.Generator | int,
) -> RunRecord:
    """One full teleportation run: prepare, measure, message, correct."""
    state = prepare(charlie_knowledge)
    outcome, bob_conditional = bell_measure(state, resource, rng)
    message = ClassicalMessage(Protocol.QT, (outcome >> 1, outcome & 1))
    bob_final = qt_correct(bob_conditional, message)
    record = RunRecord(
        protocol=Protocol.QT,
        target=state,
        outcome=outcome,
        message=message,
        bob_final=bob_final,
        prepared=charlie_knowledge,
        prep_bits=charlie_knowledge.spec.m,
    )
    record.ledger = _ledger.account(record)
    return record


def _rsp_correction(eta: PureQubit) -> Operator2:
    """Fixed correction for eta's transmissible family.

    Equatorial states (|a0| = |a1| = 1/sqrt 2) use sigma_z; states on the
    real rotation circle use sigma_y (the pi rotation about the axis normal
    to that circle).  Anything else is outside the implemented RSP family.
    """
    if abs(abs(eta.a0) - _SQRT_HALF) <= 1e-9 and abs(abs(eta.a1) - _SQRT_HALF) <= 1e-9:
        return SIGMA_Z
    if abs((eta.a0.conjugate() * eta.a1).imag) <= 1e-9:
        return SIGMA_Y
    raise DomainError(
        "RSP is implemented for equatorial states and the real rotation family"
    )


def rsp_run(
    eta: PureQubit,
    resource: EprResource,
    rng: np.random.Generator | int,
    prepared: GridPoint | None = None,
    prep_bits: int | None = None,
) -> RunRecord:
    """One RSP run of a state Alice knows.

    ``prepared``/``prep_bits`` optionally record the grid point / precision
    Alice's knowledge carries, for the information ledger.
    """
    correction = _rsp_correction(eta)
    resource.consume()
    rng = as_rng(rng)
    probs, conditionals = rsp_branches(eta, resource.joint)
    outcome = _inverse_cdf(float(rng.random()), probs)
    bob_conditional = conditionals[outcome]
    assert bob_conditional is not None
    message = ClassicalMessage(Protocol.RSP, (outcome,))
    # Alice projected onto eta itself -> Bob holds the scrambled state.
    bob_final = apply(correction, bob_conditional) if outcome == 0 else bob_conditional
    if prepared is not None and prep_bits is None:
        prep_bits = prepared.spec.m
    record = RunRecord(
        protocol=Protocol.RSP,
        target=eta,
        outcome=outcome,
        message=message,
        bob_final=bob_final,
        prepared=prepared,
        prep_bits=prep_bits,
    )
    record.ledger = _ledger.account(record) if prep_bits is not None else None
    return record


# +1 eigenvectors of (sigma_x, sigma_y, sigma_z): Bob's tomography bases.
_TOMO_PLUS = (
    PureQubit(_SQRT_HALF, _SQRT_HALF),
    PureQubit(_SQRT_HALF, 1j * _SQRT_HALF),
    UP,
)
_PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


def no_signaling_probe(
    resource: EprResource,
    alice_basis_angle: float,
    n_runs: int,
    rng: np.random.Generator | int = 0,
) -> DensityOp:
    """Bob's marginal state with Alice's outcome withheld.

    Alice measures her half in the real-plane basis at ``alice_basis_angle``.
    With ``n_runs = 0`` the exact marginal is returned (sum of branch
    projectors); with ``n_runs >= 1`` Bob reconstructs it from Pauli
    tomography counts, cycling the measured basis over runs.  Either way the
    result must be independent of the basis angle for an entangled resource.
    """
    if n_runs < 0:
        raise ValidationError("n_runs must be >= 0")
    half = alice_basis_angle / 2.0
    basis = (
        PureQubit(math.cos(half), math.sin(half)),
        PureQubit(-math.sin(half), math.cos(half)),
    )
    probs, conditionals = _projective_branches(basis, resource.joint)

    if n_runs == 0:
        rho = np.zeros((2, 2), dtype=np.complex128)
        for p, cond in zip(probs, conditionals):
            if cond is not None:
                rho += p * np.outer(cond.vec, cond.vec.conj())
        return DensityOp(rho)

    from . import _kernels

    p_plus = np.zeros((2, 3))
    for o, cond in enumerate(conditionals):
        for b, plus_vec in enumerate(_TOMO_PLUS):
            if cond is not None:
                p_plus[o, b] = abs(np.vdot(plus_vec.vec, cond.vec)) ** 2
    uniforms = as_rng(rng).random(2 * n_runs)
    counts = _kernels.tomography_counts(uniforms, float(probs[0]), p_plus)

    rho = np.eye(2, dtype=np.complex128)
    bloch = np.zeros(3)
    for b in range(3):
        n_plus, n_minus = counts[b]
        total = n_plus + n_minus
        bloch[b] = (n_plus - n_minus) / total if total else 0.0
    # Clip into the Bloch ball so tiny-sample noise still yields a valid state.
    norm = float(np.linalg.norm(bloch))
    if norm > 1.0:
        bloch /= norm
    for b in range(3):
        rho += bloch[b] * _PAULIS[b].mat
    return DensityOp(rho / 2.0)
