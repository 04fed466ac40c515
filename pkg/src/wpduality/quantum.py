"""Quantum-information primitives for N-path interferometers.

An interferometer configuration is a prior distribution over paths plus the
Gram matrix of the detector states; that pair determines the path and
detector reduced density matrices, the relative-entropy coherence, and the
statistics of any which-way measurement.  All entropies are in bits.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import matlin
from .matlin import ValidationError

__all__ = [
    "ChannelStatistics",
    "InterferometerConfig",
    "binary_entropy",
    "coherence_rel_ent",
    "detector_density_matrix",
    "mutual_information",
    "normalized_coherence",
    "path_density_matrix",
    "probability_vector",
    "shannon_entropy",
    "usd_channel_statistics",
    "von_neumann_entropy",
]

# Probabilities below this are treated as exact zeros inside entropy sums,
# removing the 0*log(0) branch; the induced error is far below test tolerances.
PROB_FLOOR = 1e-14


def probability_vector(values, tol: float = 1e-10) -> np.ndarray:
    """Validate a probability distribution and return it as a float array.

    Entries may undershoot zero by at most 1e-12 (clamped); the sum must be
    1 within ``tol``.
    """
    p = np.asarray(values, dtype=np.float64)
    if p.ndim != 1 or p.size < 1:
        raise ValidationError(f"expected a 1-d probability vector, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValidationError("probabilities contain NaN or Inf")
    if p.min() < -1e-12 or p.max() > 1 + 1e-12:
        raise ValidationError(f"probabilities outside [0, 1]: min={p.min()}, max={p.max()}")
    total = p.sum()
    if abs(total - 1.0) > tol:
        raise ValidationError(f"probabilities sum to {total!r}, expected 1 within {tol}")
    return np.clip(p, 0.0, 1.0)


def _entropy_bits(values: np.ndarray) -> float:
    # Sorted ascending so the sum is bit-for-bit invariant under permutation
    # of the input; this makes e.g. H(priors) - H(eigenvalues) exactly zero
    # for diagonal density matrices.
    v = np.sort(values[values > PROB_FLOOR])
    if v.size == 0:
        return 0.0
    return float(max(0.0, -np.sum(v * np.log2(v))))


def shannon_entropy(p) -> float:
    """Shannon entropy -sum p log2 p with the 0 log 0 := 0 convention.

    Accepts nonnegative entries (tiny negatives down to -1e-12 are clamped)
    summing to at most 1 + 1e-10; sub-normalized inputs are allowed.
    """
    v = np.asarray(p, dtype=np.float64).ravel()
    if not np.all(np.isfinite(v)):
        raise ValidationError("entropy input contains NaN or Inf")
    if v.min(initial=0.0) < -1e-12:
        raise ValidationError(f"negative probability {v.min()} beyond tolerance")
    if v.sum() > 1 + 1e-10:
        raise ValidationError(f"probabilities sum to {v.sum()} > 1")
    return _entropy_bits(np.clip(v, 0.0, None))


def binary_entropy(q: float) -> float:
    """H2(q) = -q log2 q - (1-q) log2 (1-q), with H2(0) = H2(1) = 0."""
    if not np.isfinite(q):
        raise ValidationError("binary entropy argument is not finite")
    if q < -1e-12 or q > 1 + 1e-12:
        raise ValidationError(f"binary entropy argument {q} outside [0, 1]")
    q = min(max(q, 0.0), 1.0)
    return _entropy_bits(np.array([q, 1.0 - q]))


def _clamped_spectrum(rho: np.ndarray) -> np.ndarray:
    w = matlin.eig_hermitian(rho).eigenvalues.copy()
    w[(w >= -1e-10) & (w < 0.0)] = 0.0
    return w


def von_neumann_entropy(rho) -> float:
    """Von Neumann entropy of a density matrix, in bits."""
    rho = matlin.hermitian(rho)
    w = _clamped_spectrum(rho)
    if w[-1] < 0.0:
        raise ValidationError(f"not a density matrix: eigenvalue {w[-1]:.3e} < 0")
    if abs(w.sum() - 1.0) > 1e-8:
        raise ValidationError(f"not a density matrix: trace {w.sum()!r} != 1")
    return _entropy_bits(w)


@dataclass(frozen=True)
class InterferometerConfig:
    """Path priors plus the detector-state Gram matrix.

    ``gram[j, k]`` is the overlap <eta_j|eta_k> of the detector states, so the
    diagonal is 1 and the matrix is PSD.  Detector states are never stored as
    explicit kets; the Gram matrix is the canonical representation and vectors
    are reconstructed on demand by :func:`wpduality.matlin.factor_gram`.
    """

    priors: np.ndarray
    gram: np.ndarray

    def __post_init__(self):
        p = probability_vector(self.priors)
        g = matlin.hermitian(self.gram)
        if p.size != g.shape[0]:
            raise ValidationError(
                f"priors ({p.size}) and gram ({g.shape[0]}) dimensions differ"
            )
        if p.size < 2:
            raise ValidationError("an interferometer needs at least 2 paths")
        if np.abs(np.diag(g).real - 1.0).max() > 1e-10:
            raise ValidationError("gram diagonal entries must equal 1")
        if not matlin.is_psd(g, tol=1e-9):
            raise matlin.NotPsdError("detector Gram matrix is not PSD within 1e-9")
        object.__setattr__(self, "priors", p)
        object.__setattr__(self, "gram", g)
        self.priors.setflags(write=False)
        self.gram.setflags(write=False)

    @property
    def n_paths(self) -> int:
        return self.priors.size


def path_density_matrix(cfg: InterferometerConfig) -> np.ndarray:
    """Reduced density matrix of the path degree of freedom.

    Entry (j, k) is sqrt(p_j p_k) <eta_k|eta_j>; unit trace and PSD by
    construction.
    """
    root = np.sqrt(cfg.priors)
    return root[:, None] * root[None, :] * np.conj(cfg.gram)


def detector_density_matrix(cfg: InterferometerConfig) -> np.ndarray:
    """Reduced density matrix of the detector, in the Gram-factor embedding.

    Built as sum_j p_j |eta_j><eta_j| from reconstructed state vectors; its
    nonzero spectrum equals that of the path density matrix because both
    reductions come from the same pure state.
    """
    f = matlin.factor_gram(cfg.gram)
    return (f * cfg.priors[None, :]) @ f.conj().T


def coherence_rel_ent(cfg: InterferometerConfig) -> float:
    """Relative-entropy coherence of the path state, in bits.

    Equals H({p_j}) - S(rho_p), i.e. the entropy of the dephased state minus
    the entropy of the state itself; lies in [0, log2 N].
    """
    n = cfg.n_paths
    s_path = _entropy_bits(np.clip(_clamped_spectrum(path_density_matrix(cfg)), 0.0, None))
    value = _entropy_bits(cfg.priors) - s_path
    return min(max(value, 0.0), float(np.log2(n)))


def normalized_coherence(cfg: InterferometerConfig) -> float:
    """Coherence scaled by log2 N so the result lies in [0, 1]."""
    return coherence_rel_ent(cfg) / float(np.log2(cfg.n_paths))


@dataclass(frozen=True)
class ChannelStatistics:
    """Joint statistics of a discrimination channel with a failure outcome.

    ``joint`` has shape (N, N + 1): entry (x, y) is p(x, y) for conclusive
    outcomes y < N, and column N is the inconclusive outcome f.
    """

    joint: np.ndarray
    marginal_y: np.ndarray = field(init=False)
    failure_prob: float = field(init=False)
    error_prob: float = field(init=False)

    def __post_init__(self):
        j = np.asarray(self.joint, dtype=np.float64)
        if j.ndim != 2 or j.shape[1] != j.shape[0] + 1:
            raise ValidationError(f"joint must have shape (N, N+1), got {j.shape}")
        if not np.all(np.isfinite(j)):
            raise ValidationError("joint contains NaN or Inf")
        if j.min() < -1e-10:
            raise ValidationError(f"joint has negative entry {j.min():.3e}")
        j = np.clip(j, 0.0, None)
        if abs(j.sum() - 1.0) > 1e-10:
            raise ValidationError(f"joint sums to {j.sum()!r}, expected 1")
        n = j.shape[0]
        conclusive = j[:, :n]
        errors = float(conclusive.sum() - np.trace(conclusive))
        object.__setattr__(self, "joint", j)
        object.__setattr__(self, "marginal_y", j.sum(axis=0))
        object.__setattr__(self, "failure_prob", float(j[:, n].sum()))
        object.__setattr__(self, "error_prob", errors)
        self.joint.setflags(write=False)
        self.marginal_y.setflags(write=False)

    @property
    def n_states(self) -> int:
        return self.joint.shape[0]

    def success_prob(self) -> float:
        return float(np.trace(self.joint[:, : self.n_states]))


def usd_channel_statistics(priors, success_probs) -> ChannelStatistics:
    """Channel statistics of an error-free strategy with per-state successes.

    ``success_probs[x]`` is the probability that state x, when sent, is
    identified; anything else lands in the failure column.  The error
    probability is zero by construction.
    """
    p = probability_vector(priors)
    s = np.asarray(success_probs, dtype=np.float64)
    if s.shape != p.shape:
        raise ValidationError(
            f"success probabilities shape {s.shape} does not match priors {p.shape}"
        )
    if s.min() < -1e-12 or s.max() > 1 + 1e-12:
        raise ValidationError("success probabilities must lie in [0, 1]")
    s = np.clip(s, 0.0, 1.0)
    n = p.size
    joint = np.zeros((n, n + 1))
    joint[np.arange(n), np.arange(n)] = p * s
    joint[:, n] = p * (1.0 - s)
    return ChannelStatistics(joint)


def mutual_information(stats: ChannelStatistics) -> float:
    """Mutual information I(X:Y) of the channel, in bits.

    Sums p(x, y) log2 [p(x, y) / (p_X(x) p_Y(y))] over entries with positive
    probability.
    """
    joint = stats.joint
    px = joint.sum(axis=1)
    py = stats.marginal_y
    mask = joint > PROB_FLOOR
    xs, ys = np.nonzero(mask)
    terms = joint[xs, ys] * (
        np.log2(joint[xs, ys]) - np.log2(px[xs]) - np.log2(py[ys])
    )
    return float(max(0.0, terms.sum()))
