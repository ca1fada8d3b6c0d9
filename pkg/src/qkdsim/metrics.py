"""Distances, guessing probabilities, couplings and entropy bounds.

The measurement stick for every security claim in this package: total
variation and trace distance, the optimal distinguishing test, the
Helstrom guessing probability, the maximal-coupling construction, the
guessing-probability and von Neumann entropy bounds for keys, and the
weighted mixture distance used for adaptive key lengths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import DensityOperator, Povm, born_probabilities, tensor

PROB_TOL = 1e-12


class MetricsError(ValueError):
    pass


@dataclass(frozen=True)
class Distribution:
    """Probability distribution over a finite alphabet."""

    labels: tuple
    probs: np.ndarray

    def __init__(self, labels, probs):
        labels = tuple(labels)
        p = np.asarray(probs, dtype=float)
        if len(labels) != p.shape[0]:
            raise MetricsError("labels and probabilities differ in length")
        if p.min() < -PROB_TOL:
            raise MetricsError("negative probability")
        if abs(p.sum() - 1.0) > PROB_TOL:
            raise MetricsError(f"probabilities sum to {p.sum()}, not 1")
        p = np.clip(p, 0.0, None)
        p.flags.writeable = False
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "probs", p)

    @classmethod
    def from_dict(cls, d) -> "Distribution":
        labels = tuple(d.keys())
        return cls(labels, [d[k] for k in labels])

    def __len__(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class CqEnsemble:
    """Classical-quantum state: labels k with probabilities p_k and states rho_k."""

    labels: tuple
    probs: np.ndarray
    states: tuple  # DensityOperator per label

    def __init__(self, labels, probs, states):
        labels = tuple(labels)
        states = tuple(states)
        p = np.asarray(probs, dtype=float)
        if not (len(labels) == p.shape[0] == len(states)):
            raise MetricsError("ensemble components differ in length")
        if abs(p.sum() - 1.0) > PROB_TOL or p.min() < -PROB_TOL:
            raise MetricsError("invalid ensemble probabilities")
        dim = states[0].dim
        if any(s.dim != dim for s in states):
            raise MetricsError("ensemble states have mismatched dimensions")
        p = np.clip(p, 0.0, None)
        p.flags.writeable = False
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "states", states)

    @classmethod
    def from_classical_joint(cls, joint: np.ndarray) -> "CqEnsemble":
        """Build rho_KE from a classical joint P(k, e): E states are diagonal."""
        joint = np.asarray(joint, dtype=float)
        pk = joint.sum(axis=1)
        states = []
        for k in range(joint.shape[0]):
            if pk[k] <= 0:
                d = np.ones(joint.shape[1]) / joint.shape[1]
            else:
                d = joint[k] / pk[k]
            states.append(DensityOperator(np.diag(d.astype(complex))))
        return cls(tuple(range(joint.shape[0])), pk, states)

    @property
    def n_labels(self) -> int:
        return len(self.labels)

    @property
    def env_dim(self) -> int:
        return self.states[0].dim

    def env_marginal(self) -> DensityOperator:
        acc = sum(p * s.matrix for p, s in zip(self.probs, self.states))
        return DensityOperator(acc)


@dataclass(frozen=True)
class Coupling:
    """Joint distribution over pairs (z, z~) with prescribed marginals."""

    labels: tuple
    joint: np.ndarray

    def __init__(self, labels, joint):
        labels = tuple(labels)
        j = np.asarray(joint, dtype=float)
        if j.shape != (len(labels), len(labels)):
            raise MetricsError("coupling matrix shape mismatch")
        if j.min() < -PROB_TOL or abs(j.sum() - 1.0) > PROB_TOL:
            raise MetricsError("coupling is not a probability distribution")
        j = np.clip(j, 0.0, None)
        j.flags.writeable = False
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "joint", j)

    def marginal_left(self) -> Distribution:
        return Distribution(self.labels, self.joint.sum(axis=1))

    def marginal_right(self) -> Distribution:
        return Distribution(self.labels, self.joint.sum(axis=0))

    def pr_equal(self) -> float:
        return float(np.trace(self.joint))


# ---------------------------------------------------------------------------
# Distances and distinguishing
# ---------------------------------------------------------------------------


def _check_same_alphabet(p: Distribution, q: Distribution):
    if p.labels != q.labels:
        raise MetricsError("distributions live on different alphabets")


def total_variation(p: Distribution, q: Distribution) -> float:
    """Half the l1 distance; equals 1 - sum of pointwise minima."""
    _check_same_alphabet(p, q)
    return 0.5 * float(np.abs(p.probs - q.probs).sum())


def trace_distance(rho: DensityOperator, sigma: DensityOperator) -> float:
    """Half the trace norm of rho - sigma."""
    if rho.dim != sigma.dim:
        raise MetricsError("states have different dimensions")
    ev = np.linalg.eigvalsh(rho.matrix - sigma.matrix)
    return 0.5 * float(np.abs(ev).sum())


def optimal_test(rho: DensityOperator, sigma: DensityOperator) -> tuple:
    """Projector M onto the positive eigenspace of rho - sigma.

    Returns (M, value) with value = tr(M (rho - sigma)) equal to the
    trace distance; no contraction 0 <= M' <= I can do better.
    """
    if rho.dim != sigma.dim:
        raise MetricsError("states have different dimensions")
    diff = rho.matrix - sigma.matrix
    ev, vec = np.linalg.eigh(diff)
    pos = vec[:, ev > 0]
    m = pos @ pos.conj().T
    value = float(np.trace(m @ diff).real)
    return m, value


def helstrom_guess(rho: DensityOperator, sigma: DensityOperator) -> float:
    """Best probability of guessing which of two equally likely states one holds."""
    return 0.5 + 0.5 * trace_distance(rho, sigma)


def maximal_coupling(p: Distribution, q: Distribution) -> Coupling:
    """The coupling achieving Pr[Z = Z~] = 1 - total variation.

    Diagonal entries are min(p, q); the remaining mass is distributed as
    the product of the residuals divided by the distance.  When p = q the
    coupling is purely diagonal.
    """
    _check_same_alphabet(p, q)
    mins = np.minimum(p.probs, q.probs)
    d = 1.0 - mins.sum()
    joint = np.diag(mins)
    if d > PROB_TOL:
        r_left = p.probs - mins
        r_right = q.probs - mins
        joint = joint + np.outer(r_left, r_right) / d
    return Coupling(p.labels, joint)


def coupled_measurement(
    rho: DensityOperator, sigma: DensityOperator, m: Povm
) -> Coupling:
    """Couple the outcome distributions of measuring rho and sigma with m.

    The resulting coupling satisfies Pr[W != W~] <= D(rho, sigma).
    """
    labels = tuple(range(len(m)))
    pw = Distribution(labels, born_probabilities(rho, m))
    qw = Distribution(labels, born_probabilities(sigma, m))
    return maximal_coupling(pw, qw)


# ---------------------------------------------------------------------------
# Guessing probability
# ---------------------------------------------------------------------------


def pguess_classical(joint: np.ndarray) -> float:
    """Probability of guessing K from E for a classical joint P(k, e)."""
    j = np.asarray(joint, dtype=float)
    if j.min() < -PROB_TOL or abs(j.sum() - 1.0) > PROB_TOL:
        raise MetricsError("invalid joint distribution")
    return float(j.max(axis=0).sum())


def _cq_distance_from_uniform(ensemble: CqEnsemble) -> float:
    """D(rho_KE, tau_K x rho_E), block diagonal over the classical label."""
    rho_e = ensemble.env_marginal().matrix
    inv_k = 1.0 / ensemble.n_labels
    total = 0.0
    for p, s in zip(ensemble.probs, ensemble.states):
        ev = np.linalg.eigvalsh(p * s.matrix - inv_k * rho_e)
        total += np.abs(ev).sum()
    return 0.5 * float(total)


def _is_classical_ensemble(ensemble: CqEnsemble) -> bool:
    return all(
        np.abs(s.matrix - np.diag(np.diag(s.matrix))).max() < 1e-12
        for s in ensemble.states
    )


@dataclass(frozen=True)
class PguessReport:
    bound: float
    measured: float
    mode: str  # exact | helstrom | pgm-lower-bound


def pguess_bound_check(ensemble: CqEnsemble) -> PguessReport:
    """Compare a guessing probability against 1/|K| + D(rho_KE, tau_K x rho_E).

    The measured value is exact for classical E, Helstrom-optimal for
    |K| = 2, and otherwise the pretty-good-measurement success rate,
    which only lower bounds the optimum.
    """
    bound = 1.0 / ensemble.n_labels + _cq_distance_from_uniform(ensemble)
    if _is_classical_ensemble(ensemble):
        joint = np.stack(
            [p * np.diag(s.matrix).real for p, s in zip(ensemble.probs, ensemble.states)]
        )
        return PguessReport(bound, pguess_classical(joint), "exact")
    if ensemble.n_labels == 2:
        diff = (
            ensemble.probs[0] * ensemble.states[0].matrix
            - ensemble.probs[1] * ensemble.states[1].matrix
        )
        ev = np.linalg.eigvalsh(diff)
        measured = 0.5 * (1.0 + np.abs(ev).sum())
        return PguessReport(bound, float(measured), "helstrom")
    # Pretty-good measurement: Gamma_k = rho_E^{-1/2} p_k rho_k rho_E^{-1/2}.
    rho_e = ensemble.env_marginal().matrix
    ev, vec = np.linalg.eigh(rho_e)
    inv_root = vec @ np.diag([1 / np.sqrt(x) if x > 1e-14 else 0.0 for x in ev]) @ vec.conj().T
    measured = 0.0
    for p, s in zip(ensemble.probs, ensemble.states):
        gamma = inv_root @ (p * s.matrix) @ inv_root
        measured += p * np.trace(gamma @ s.matrix).real
    return PguessReport(bound, float(measured), "pgm-lower-bound")


# ---------------------------------------------------------------------------
# Entropies
# ---------------------------------------------------------------------------


def binary_entropy(p: float) -> float:
    """-p log2 p - (1-p) log2 (1-p), with h(0) = h(1) = 0."""
    if not 0.0 <= p <= 1.0:
        raise MetricsError(f"binary_entropy argument {p} outside [0, 1]")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def _shannon(probs: np.ndarray) -> float:
    p = probs[probs > 1e-15]
    return float(-(p * np.log2(p)).sum())


def von_neumann_entropy(rho: DensityOperator) -> float:
    return _shannon(np.clip(rho.eigenvalues(), 0.0, None))


@dataclass(frozen=True)
class EntropyBoundsReport:
    eps: float
    conditional_entropy: float
    lower: float
    upper: float
    lower_checked: bool
    ok: bool


def entropy_bounds_check(ensemble: CqEnsemble, slack: float = 1e-9) -> EntropyBoundsReport:
    """Check (1-8e) log|K| - 2h(2e) <= S(K|E) <= log|K| - 2e^2.

    e is the trace distance of rho_KE from tau_K x rho_E.  The lower
    bound requires e <= 1/4 and is skipped (flagged) otherwise.
    """
    eps = _cq_distance_from_uniform(ensemble)
    # Eigenvalues of the block-diagonal rho_KE: union over k of p_k eig(rho_k).
    eig_ke = np.concatenate(
        [np.clip(p * s.eigenvalues(), 0.0, None) for p, s in zip(ensemble.probs, ensemble.states)]
    )
    s_ke = _shannon(eig_ke)
    s_e = von_neumann_entropy(ensemble.env_marginal())
    s_cond = s_ke - s_e
    log_k = math.log2(ensemble.n_labels)
    upper = log_k - 2 * eps**2
    lower_checked = eps <= 0.25
    lower = (1 - 8 * eps) * log_k - 2 * binary_entropy(min(2 * eps, 1.0)) if lower_checked else -np.inf
    ok = s_cond <= upper + slack and (not lower_checked or s_cond >= lower - slack)
    return EntropyBoundsReport(eps, s_cond, lower, upper, lower_checked, ok)


def accessible_information_classical(joint: np.ndarray) -> float:
    """Shannon mutual information I(K;Z) = H(K) + H(Z) - H(KZ) for classical joints."""
    j = np.asarray(joint, dtype=float)
    if j.min() < -PROB_TOL or abs(j.sum() - 1.0) > PROB_TOL:
        raise MetricsError("invalid joint distribution")
    hk = _shannon(j.sum(axis=1))
    hz = _shannon(j.sum(axis=0))
    hkz = _shannon(j.reshape(-1))
    return hk + hz - hkz


def min_entropy_classical(joint: np.ndarray) -> float:
    """-log2 of the guessing probability of K given E."""
    return -math.log2(pguess_classical(joint))


def mixture_distance(terms) -> float:
    """Adaptive key-length criterion: sum_m p_m D(rho^m_KE, tau^m_K x rho^m_E).

    `terms` is an iterable of (p_m, CqEnsemble); the total weight may be
    below 1 (the remainder being the abort branch contributes zero).
    """
    total_p = 0.0
    acc = 0.0
    for p_m, ensemble in terms:
        if p_m < -PROB_TOL:
            raise MetricsError("negative mixture weight")
        total_p += p_m
        acc += p_m * _cq_distance_from_uniform(ensemble)
    if total_p > 1.0 + PROB_TOL:
        raise MetricsError("mixture weights exceed 1")
    return float(acc)


def cq_trace_distance_from_uniform(ensemble: CqEnsemble) -> float:
    """Public name for D(rho_KE, tau_K x rho_E)."""
    return _cq_distance_from_uniform(ensemble)
