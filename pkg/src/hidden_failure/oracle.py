"""Rejection-sampling check of the analytic posterior.

The generative story is simulated literally: draw a (hypothesis, state) cell
from the joint prior, draw ``n`` measurements from that cell, and keep the
draw only if it reproduces the observed positive count.  Nothing here
evaluates a likelihood, so agreement with :func:`hidden_failure.posterior` is
an independent check.

Draws are made in fixed-size chunks, chunk ``i`` seeded from
``SeedSequence(seed, spawn_key=(i,))``.  Chunks are merged in index order and
sampling stops after the first chunk that brings the acceptance count to
``min_accepted``, so the result does not depend on how many workers ran.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ModelError, OracleBudgetError
from .model import Evidence, FailureModel

DEFAULT_CHUNK = 1 << 16


@dataclass(frozen=True)
class OracleEstimate:
    estimate: np.ndarray
    standard_error: np.ndarray
    accepted_counts: np.ndarray
    accepted_samples: int
    total_samples: int
    seed: int

    def z_scores(self, analytic) -> np.ndarray:
        diff = np.asarray(analytic, dtype=float) - self.estimate
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.where(diff == 0, 0.0, diff / self.standard_error)
        return z

    def agrees_with(self, analytic, n_se: float = 3.0) -> bool:
        return bool(np.all(np.abs(self.z_scores(analytic)) <= n_se))


def _run_chunk(
    prior_flat: np.ndarray,
    theta_flat: np.ndarray,
    evidence: Evidence,
    size: int,
    seed: int,
    index: int,
) -> np.ndarray:
    """Accepted draws per cell for one chunk of ``size`` simulated cases."""
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
    cells = rng.multinomial(size, prior_flat)
    accepted = np.zeros(len(prior_flat), dtype=np.int64)
    for j, count in enumerate(cells):
        if count == 0:
            continue
        positives = rng.binomial(evidence.n, theta_flat[j], size=count)
        accepted[j] = np.count_nonzero(positives == evidence.k)
    return accepted


def estimate_posterior(
    model: FailureModel,
    evidence: Evidence,
    min_accepted: int = 10_000,
    max_total: int = 10**8,
    seed: int = 0,
    chunk_size: int = DEFAULT_CHUNK,
    workers: int = 1,
) -> OracleEstimate:
    """Estimate P[hypothesis | evidence] by simulating the model and conditioning.

    The standard error uses the add-one-smoothed frequency
    ``(a + 1) / (m + 2)`` in place of the raw frequency, so an estimate of
    exactly 0 or 1 from ``m`` acceptances still carries an error of order
    ``1/m`` rather than zero.
    """
    if min_accepted < 100:
        raise ModelError(f"min_accepted must be at least 100, got {min_accepted}")
    if max_total < 1 or chunk_size < 1 or workers < 1:
        raise ModelError("max_total, chunk_size and workers must be positive")
    if not 0 <= seed < 2**64:
        raise ModelError(f"seed must be an unsigned 64-bit integer, got {seed}")

    H, S = model.shape
    # multinomial rejects probabilities summing above 1 by rounding
    prior_flat = model.joint_prior.ravel() / model.joint_prior.sum()
    theta_flat = model.positive_prob.ravel()

    accepted = np.zeros(H * S, dtype=np.int64)
    total = 0
    index = 0
    with ThreadPoolExecutor(max_workers=workers) as pool:
        while total < max_total and accepted.sum() < min_accepted:
            batch = []
            planned = total
            for _ in range(workers):
                if planned >= max_total:
                    break
                size = min(chunk_size, max_total - planned)
                batch.append((index + len(batch), size))
                planned += size
            futures = [
                pool.submit(_run_chunk, prior_flat, theta_flat, evidence, size, seed, i)
                for i, size in batch
            ]
            for (i, size), fut in zip(batch, futures):
                accepted += fut.result()
                total += size
                index = i + 1
                if accepted.sum() >= min_accepted:
                    break

    n_acc = int(accepted.sum())
    if n_acc < min_accepted:
        raise OracleBudgetError(
            f"only {n_acc} of {min_accepted} required acceptances after "
            f"{total} draws (k={evidence.k} of n={evidence.n})"
        )
    per_hyp = accepted.reshape(H, S).sum(axis=1)
    est = per_hyp / n_acc
    smoothed = (per_hyp + 1) / (n_acc + 2)
    se = np.sqrt(smoothed * (1 - smoothed) / n_acc)
    for arr in (est, se, per_hyp):
        arr.setflags(write=False)
    return OracleEstimate(est, se, per_hyp, n_acc, total, seed)

