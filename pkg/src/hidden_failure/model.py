"""Hidden-failure-state model and exact posteriors.

The joint prior is over (hypothesis, failure state) cells.  Each cell has its
own per-measurement positive probability, so ``k`` positives out of ``n``
measurements have a binomial likelihood in every cell.  All arithmetic is in
log space, which keeps ``n`` in the millions from underflowing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import expit, gammaln, logsumexp, xlog1py, xlogy

from .errors import DegenerateEvidenceError, ModelError

PRIOR_SUM_TOL = 1e-12


def _frozen(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 2:
        raise ModelError(f"{name} must be a 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ModelError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FailureModel:
    """Joint prior over (hypothesis, failure state) plus per-cell response rates.

    Rows index hypotheses, columns index failure states.  ``positive_prob[i, f]``
    is the probability that a single measurement is positive given hypothesis
    ``i`` and state ``f``.
    """

    hypothesis_labels: tuple[str, ...]
    state_labels: tuple[str, ...]
    joint_prior: np.ndarray
    positive_prob: np.ndarray

    def __post_init__(self):
        hyps = tuple(str(h) for h in self.hypothesis_labels)
        states = tuple(str(s) for s in self.state_labels)
        prior = _frozen(self.joint_prior, "joint_prior")
        theta = _frozen(self.positive_prob, "positive_prob")

        if len(hyps) < 2:
            raise ModelError("need at least two hypotheses")
        if len(states) < 1:
            raise ModelError("need at least one failure state")
        shape = (len(hyps), len(states))
        if prior.shape != shape or theta.shape != shape:
            raise ModelError(
                f"matrix shapes {prior.shape} and {theta.shape} do not match "
                f"labels {shape}"
            )
        if np.any(prior < 0):
            raise ModelError("joint_prior entries must be non-negative")
        if abs(prior.sum() - 1.0) > PRIOR_SUM_TOL:
            raise ModelError(f"joint_prior sums to {prior.sum()!r}, not 1")
        if np.any((theta < 0) | (theta > 1)):
            raise ModelError("positive_prob entries must lie in [0, 1]")

        object.__setattr__(self, "hypothesis_labels", hyps)
        object.__setattr__(self, "state_labels", states)
        object.__setattr__(self, "joint_prior", prior)
        object.__setattr__(self, "positive_prob", theta)

    @property
    def shape(self) -> tuple[int, int]:
        return self.joint_prior.shape

    @property
    def hypothesis_prior(self) -> np.ndarray:
        return self.joint_prior.sum(axis=1)

    def hypothesis_index(self, label: str | int) -> int:
        """Resolve a hypothesis label (or an already-valid index) to its row."""
        if isinstance(label, (int, np.integer)):
            if not 0 <= label < len(self.hypothesis_labels):
                raise ModelError(f"hypothesis index {label} out of range")
            return int(label)
        try:
            return self.hypothesis_labels.index(label)
        except ValueError:
            raise ModelError(
                f"unknown hypothesis {label!r}; have {list(self.hypothesis_labels)}"
            ) from None

    def to_dict(self) -> dict:
        return {
            "hypothesis_labels": list(self.hypothesis_labels),
            "state_labels": list(self.state_labels),
            "joint_prior": self.joint_prior.tolist(),
            "positive_prob": self.positive_prob.tolist(),
        }


@dataclass(frozen=True)
class Evidence:
    """``k`` positive responses among ``n`` exchangeable measurements."""

    n: int
    k: int

    def __post_init__(self):
        for name in ("n", "k"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise ModelError(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if not 0 <= self.k <= self.n:
            raise ModelError(f"need 0 <= k <= n, got n={self.n}, k={self.k}")

    @classmethod
    def unanimous(cls, n: int) -> "Evidence":
        return cls(n, n)


@dataclass(frozen=True)
class PosteriorResult:
    joint: np.ndarray
    hypothesis_marginal: np.ndarray
    state_marginal: np.ndarray

    def to_dict(self) -> dict:
        return {
            "joint": self.joint.tolist(),
            "hypothesis_marginal": self.hypothesis_marginal.tolist(),
            "state_marginal": self.state_marginal.tolist(),
        }


def log_binomial_pmf(n: int, k: int, p: float) -> float:
    """Natural log of ``P[X = k]`` for ``X ~ Bin(n, p)``.

    Exact at ``p`` in {0, 1}: returns ``-inf`` for impossible outcomes and 0 for
    forced ones.

    >>> log_binomial_pmf(0, 0, 0.3)
    0.0
    >>> round(log_binomial_pmf(5, 5, 0.7), 5)
    -1.78337
    """
    if n < 0 or not 0 <= k <= n:
        raise ModelError(f"need 0 <= k <= n, got n={n}, k={k}")
    if not 0.0 <= p <= 1.0:
        raise ModelError(f"probability must lie in [0, 1], got {p!r}")
    return float(_log_binomial(n, k, p))


def _log_binomial(n, k, theta):
    """Vectorised log binomial pmf; ``n``, ``k`` and ``theta`` broadcast."""
    n = np.asarray(n, dtype=float)
    k = np.asarray(k, dtype=float)
    log_coef = gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
    # xlogy/xlog1py give 0 * log(0) = 0, which makes p in {0, 1} exact
    return log_coef + xlogy(k, theta) + xlog1py(n - k, -np.asarray(theta))


def _log_prior(model: FailureModel) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(model.joint_prior)


def log_joint(model: FailureModel, evidence: Evidence) -> np.ndarray:
    """Unnormalised log posterior over cells, ``-inf`` where impossible."""
    loglik = _log_binomial(evidence.n, evidence.k, model.positive_prob)
    return loglik + _log_prior(model)


def posterior(model: FailureModel, evidence: Evidence) -> PosteriorResult:
    """Exact joint and marginal posteriors of ``model`` given ``evidence``."""
    lj = log_joint(model, evidence)
    total = logsumexp(lj)
    if not np.isfinite(total):
        raise DegenerateEvidenceError(
            f"observation k={evidence.k} of n={evidence.n} is impossible "
            "under every cell of the model"
        )
    joint = np.exp(lj - total)
    joint.setflags(write=False)
    hyp = joint.sum(axis=1)
    state = joint.sum(axis=0)
    hyp.setflags(write=False)
    state.setflags(write=False)
    return PosteriorResult(joint, hyp, state)


@dataclass(frozen=True)
class PosteriorCurve:
    """Target-hypothesis posterior for ``n = 0 .. n_max``.

    ``fraction`` is ``None`` for unanimous evidence (``k = n``); otherwise
    ``k = round(fraction * n)`` with halves rounded up.
    """

    values: np.ndarray
    target_hypothesis: int
    fraction: float | None = None
    ks: np.ndarray = field(default=None, repr=False)

    @property
    def n_max(self) -> int:
        return len(self.values) - 1

    @property
    def ns(self) -> np.ndarray:
        return np.arange(len(self.values))

    @property
    def mode(self) -> str:
        return "unanimous" if self.fraction is None else f"fraction:{self.fraction:g}"


def successes_for(ns: np.ndarray, fraction: float | None) -> np.ndarray:
    ns = np.asarray(ns, dtype=np.int64)
    if fraction is None:
        return ns.copy()
    if not 0.0 <= fraction <= 1.0:
        raise ModelError(f"fraction must lie in [0, 1], got {fraction!r}")
    ks = np.floor(fraction * ns + 0.5).astype(np.int64)
    return np.minimum(ks, ns)


def target_posterior(
    model: FailureModel, ns: Sequence[int], ks: Sequence[int], target: int = 0
) -> np.ndarray:
    """P[target | k of n] for each paired ``(n, k)``, vectorised over the pairs."""
    ns = np.asarray(ns, dtype=float)[:, None, None]
    ks = np.asarray(ks, dtype=float)[:, None, None]
    lj = _log_binomial(ns, ks, model.positive_prob[None]) + _log_prior(model)[None]
    total = logsumexp(lj, axis=(1, 2))
    bad = ~np.isfinite(total)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise DegenerateEvidenceError(
            f"observation k={int(ks[i, 0, 0])} of n={int(ns[i, 0, 0])} is "
            "impossible under every cell of the model"
        )
    others = np.delete(lj, target, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        top = logsumexp(lj[:, target, :], axis=1)
        rest = logsumexp(others.reshape(len(lj), -1), axis=1)
        # logistic form keeps values near 1 monotone under rounding
        return expit(top - rest)


def posterior_curve(
    model: FailureModel,
    n_max: int,
    fraction: float | None = None,
    target: int | str = 0,
) -> PosteriorCurve:
    """Posterior of ``target`` as the number of measurements grows.

    With ``fraction=None`` every measurement is positive; otherwise the
    positive count tracks ``fraction * n``.
    """
    if n_max < 0:
        raise ModelError(f"n_max must be non-negative, got {n_max}")
    target = model.hypothesis_index(target)
    ns = np.arange(n_max + 1)
    ks = successes_for(ns, fraction)
    values = target_posterior(model, ns, ks, target)
    values.setflags(write=False)
    ks.setflags(write=False)
    return PosteriorCurve(values, target, fraction, ks)
