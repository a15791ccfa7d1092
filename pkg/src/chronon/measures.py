"""Dynamical information measures of a process.

For a hermitian state over time psi(rho, E)::

    S_psi = S(psi)                      joint entropy
    H_psi = S_psi - S(rho)              conditional entropy
    I_psi = S(rho) + S(E(rho)) - S_psi  mutual information
    K_psi = S_psi - S(E(rho))           information discrepancy

so that I_psi + K_psi = S(rho) by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg
from .channel import Channel
from .entropy import DEFAULT_BASE, ext_entropy, qdist_entropy
from .errors import (InvalidEffects, NonHermitianSot, NotOrthogonal, NotPure,
                     NotStateLinear, ShapeMismatch)
from .mmalg import AlgElement, classical_algebra
from .sot import Process, SotKind, SYM_BLOOM, sot_value, sym_p_bloom

CSV_HEADER = ("kind", "s_in", "s_out", "s_psi", "h_psi", "i_psi", "k_psi")


@dataclass(frozen=True)
class MeasureReport:
    kind: SotKind
    s_in: float
    s_out: float
    s_psi: float
    h_psi: float
    i_psi: float
    k_psi: float
    conservation_residual: float

    @classmethod
    def from_entropies(cls, kind: SotKind, s_in: float, s_out: float, s_psi: float) -> "MeasureReport":
        h = s_psi - s_in
        i = s_in + s_out - s_psi
        k = s_psi - s_out
        return cls(kind, s_in, s_out, s_psi, h, i, k, abs(i + k - s_in))

    def values(self) -> tuple[float, float, float, float]:
        return (self.s_psi, self.h_psi, self.i_psi, self.k_psi)

    def to_dict(self) -> dict:
        out = {"kind": str(self.kind)}
        for name in CSV_HEADER[1:]:
            out[name] = getattr(self, name)
        out["conservation_residual"] = self.conservation_residual
        return out

    def csv_row(self) -> list:
        return [str(self.kind)] + [repr(float(getattr(self, n))) for n in CSV_HEADER[1:]]


def _require_hermitian_kind(kind: SotKind):
    if not kind.is_hermitian:
        raise NonHermitianSot(f"{kind} does not produce hermitian states over time")


def measures_of(kind: SotKind, rho: AlgElement, e: Channel, base: float = DEFAULT_BASE) -> MeasureReport:
    """Measures without validating rho or E (used for reverse maps and quasi-states)."""
    _require_hermitian_kind(kind)
    psi = sot_value(kind, rho, e)
    if not psi.is_hermitian():
        raise NonHermitianSot(f"{kind} gave a non-hermitian value on this process")
    return MeasureReport.from_entropies(
        kind, ext_entropy(rho, base), ext_entropy(e.apply(rho), base), ext_entropy(psi, base))


def all_measures(kind: SotKind, proc: Process, base: float = DEFAULT_BASE) -> MeasureReport:
    return measures_of(kind, proc.rho, proc.channel, base)


@dataclass(frozen=True)
class PovmClosedForm:
    report: MeasureReport
    probabilities: np.ndarray
    conditional_states: list = field(default_factory=list)  # None for zero-probability outcomes


def _effects(effects) -> list[np.ndarray]:
    mats = [linalg.as_matrix(e) for e in effects]
    n = mats[0].shape[0]
    if any(m.shape != (n, n) or not linalg.is_psd(m) for m in mats):
        raise InvalidEffects("effects must be positive semidefinite and of a common size")
    if np.max(np.abs(sum(mats) - np.eye(n))) > 1e-9:
        raise InvalidEffects("effects do not sum to the identity")
    return mats


def _as_block(rho) -> np.ndarray:
    return rho.blocks[0] if isinstance(rho, AlgElement) else linalg.as_matrix(rho)


def povm_closed_form(p: float, rho, effects, base: float = DEFAULT_BASE) -> PovmClosedForm:
    """Measures of the symmetric p-bloom for a POVM from the outcome-wise states.

    rho_p^y = (rho^p E_y rho^(1-p) + rho^(1-p) E_y rho^p) / (2 q_y) with
    q_y = tr(rho E_y); outcomes with q_y = 0 drop out.
    """
    mats = _effects(effects)
    r = _as_block(rho)
    rp, r1p = linalg.psd_power(r, p), linalg.psd_power(r, 1 - p)
    q = np.array([np.real(np.trace(r @ e)) for e in mats])
    cond = []
    weighted = 0.0
    for qy, e in zip(q, mats):
        if qy <= linalg.ZERO_TOL:
            cond.append(None)
            continue
        st = (rp @ e @ r1p + r1p @ e @ rp) / (2 * qy)
        cond.append(st)
        weighted += qy * ext_entropy(st, base)
    s_in = ext_entropy(r, base)
    h_q = qdist_entropy(q, base)
    report = MeasureReport.from_entropies(sym_p_bloom(p), s_in, h_q, h_q + weighted)
    return PovmClosedForm(report, q, cond)


def _pure_vector(rho) -> np.ndarray:
    eig = linalg.herm_eigen(_as_block(rho))
    w = eig.eigenvalues
    if abs(w[-1] - 1) > 1e-9 or np.any(np.abs(w[:-1]) > 1e-9):
        raise NotPure("state is not rank one")
    return eig.eigenvectors[:, -1]


DISTURBING = "disturbing"
NON_DISTURBING = "non_disturbing"


def classify_disturbing(rho, effects) -> str:
    """Non-disturbing iff the state vector is an eigenvector of every effect it can trigger."""
    v = _pure_vector(rho)
    for e in _effects(effects):
        ev = e @ v
        if np.real(np.vdot(v, ev)) <= linalg.ZERO_TOL:
            continue
        if np.linalg.norm(ev - np.vdot(v, ev) * v) >= 1e-9:
            return DISTURBING
    return NON_DISTURBING


@dataclass(frozen=True)
class DisturbanceCheck:
    label: str
    clause: str
    report: MeasureReport
    holds: bool


def disturbance_theorem_check(p: float, rho, effects, base: float = DEFAULT_BASE,
                              tol: float = 1e-9) -> DisturbanceCheck:
    """Check the clause of the POVM disturbance theorem that applies to (p, rho)."""
    label = classify_disturbing(rho, effects)
    rep = povm_closed_form(p, rho, effects, base).report
    if 0 < p < 1:
        clause = "interior"
        holds = abs(rep.i_psi) < tol and abs(rep.k_psi) < tol
    elif label == NON_DISTURBING:
        clause = "endpoint-non-disturbing"
        holds = abs(rep.i_psi) < tol and abs(rep.k_psi) < tol
    else:
        clause = "endpoint-disturbing"
        holds = rep.i_psi > tol and abs(rep.i_psi + rep.k_psi) < tol
    return DisturbanceCheck(label, clause, rep, holds)


def cq_preparation_measures(p: Sequence[float], prep: Channel, base: float = DEFAULT_BASE,
                            kind: SotKind = SYM_BLOOM) -> MeasureReport:
    """Closed-form measures of a classical-quantum preparation process.

    S = H(p) + sum p_x S(rho^x); I is the Holevo quantity S(rho_bar) - sum p_x S(rho^x).
    """
    p = np.asarray(p, dtype=float)
    if prep.dom.blocks != classical_algebra(len(p)).blocks:
        raise ShapeMismatch("preparation domain must be C^X with |X| = len(p)")
    states = [prep.apply_unit(x, 0, 0) for x in range(len(p))]
    mean = sum((px * s for px, s in zip(p, states)), AlgElement.zeros(prep.cod))
    avg = float(sum(px * ext_entropy(s, base) for px, s in zip(p, states)))
    h_p = qdist_entropy(p, base)
    return MeasureReport.from_entropies(kind, h_p, ext_entropy(mean, base), h_p + avg)


@dataclass(frozen=True)
class ConvexLinearityResiduals:
    s: float
    h: float
    i: float
    k: float

    def max(self) -> float:
        return max(self.s, self.h, self.i, self.k)


def _orthogonal(elems: Sequence[AlgElement]) -> bool:
    mats = [e.bloc() for e in elems]
    return all(np.linalg.norm(mats[a] @ mats[b]) < 1e-9
               for a in range(len(mats)) for b in range(a + 1, len(mats)))


def convex_linearity_check(p: Sequence[float], states: Sequence[AlgElement], e: Channel,
                           kind: SotKind = SYM_BLOOM, base: float = DEFAULT_BASE) -> ConvexLinearityResiduals:
    """Residuals of the four mixing identities for an orthogonal family.

    With rho = sum p_x rho^x (p may be a quasi-distribution)::

        S(rho, E) = H(p) + sum p_x S(rho^x, E)     I likewise
        H(rho, E) = sum p_x H(rho^x, E)            K likewise

    The states over time psi(rho^x, E) must be mutually orthogonal, and for
    the S(E(rho)) term to split the outputs E(rho^x) must be as well.
    """
    _require_hermitian_kind(kind)
    if not kind.is_state_linear:
        raise NotStateLinear(f"{kind} is not linear in the state")
    p = np.asarray(p, dtype=float)
    if abs(p.sum() - 1) > 1e-9:
        raise ValueError("weights must sum to one")
    if not _orthogonal(states):
        raise NotOrthogonal("input states are not mutually orthogonal")
    psis = [sot_value(kind, s, e) for s in states]
    if not _orthogonal(psis):
        raise NotOrthogonal("states over time are not mutually orthogonal")
    if not _orthogonal([e.apply(s) for s in states]):
        raise NotOrthogonal("channel outputs are not mutually orthogonal")
    parts = [measures_of(kind, s, e, base) for s in states]
    mix = sum((px * s for px, s in zip(p, states)), AlgElement.zeros(states[0].shape))
    whole = measures_of(kind, mix, e, base)
    h_p = qdist_entropy(p, base)

    def avg(attr):
        return float(sum(px * getattr(r, attr) for px, r in zip(p, parts)))

    return ConvexLinearityResiduals(
        s=abs(whole.s_psi - h_p - avg("s_psi")),
        h=abs(whole.h_psi - avg("h_psi")),
        i=abs(whole.i_psi - h_p - avg("i_psi")),
        k=abs(whole.k_psi - avg("k_psi")),
    )
