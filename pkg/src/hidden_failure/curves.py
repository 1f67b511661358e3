"""Peak, limit, ceiling and decision-band analysis of posterior curves."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, ModelError, UndefinedLimitError
from .model import Evidence, FailureModel, PosteriorCurve, posterior, posterior_curve

THETA_TIE_TOL = 1e-12
LIMIT_TOL = 1e-6
MAX_CURVE_N = 10**6


def find_peak(curve: PosteriorCurve) -> tuple[int, float]:
    """Smallest ``n`` attaining the curve maximum, and that maximum."""
    if len(curve.values) == 0:
        raise ModelError("cannot find the peak of an empty curve")
    i = int(np.argmax(curve.values))
    return i, float(curve.values[i])


def asymptote(model: FailureModel, target: int | str = 0) -> float:
    """Limit of P[target | n of n positive] as ``n`` grows without bound.

    Only cells with the largest positive probability survive in the limit, so
    the answer is the target's share of the prior mass in those cells.
    """
    target = model.hypothesis_index(target)
    theta = model.positive_prob
    live = model.joint_prior > 0
    if not np.any(live & (theta > 0)):
        raise UndefinedLimitError(
            "no cell with positive prior mass can produce a positive response"
        )
    top = theta[live].max()
    dominant = live & (np.abs(theta - top) <= THETA_TIE_TOL)
    mass = np.where(dominant, model.joint_prior, 0.0)
    return float(mass[target].sum() / mass.sum())


def extend_curve(
    model: FailureModel,
    target: int | str = 0,
    n_start: int = 64,
    tol: float = LIMIT_TOL,
    n_cap: int = MAX_CURVE_N,
) -> PosteriorCurve:
    """Unanimous curve long enough that its tail sits within ``tol`` of the limit.

    ``n_max`` doubles from ``n_start``; exceeding ``n_cap`` raises
    :class:`ConvergenceError`.
    """
    target = model.hypothesis_index(target)
    limit = asymptote(model, target)
    n_max = max(int(n_start), 1)
    while True:
        curve = posterior_curve(model, min(n_max, n_cap), target=target)
        if abs(curve.values[-1] - limit) <= tol:
            return curve
        if n_max >= n_cap:
            raise ConvergenceError(
                f"curve still {abs(curve.values[-1] - limit):.3g} from its limit "
                f"{limit:.12g} at n={n_cap}"
            )
        n_max *= 2


def confidence_ceiling(curve: PosteriorCurve, tau: float) -> tuple[bool, float]:
    """Whether any point of ``curve`` reaches ``tau``, and the curve maximum.

    Pass a curve from :func:`extend_curve` so the maximum is the supremum.
    """
    _, top = find_peak(curve)
    return bool(top >= tau), top


def threshold_runs(values: np.ndarray, tau: float) -> list[tuple[int, int]]:
    """Inclusive index runs where ``values >= tau``."""
    above = np.asarray(values) >= tau
    runs = []
    start = None
    for i, flag in enumerate(above):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, len(above) - 1))
    return runs


@dataclass(frozen=True)
class CurveSummary:
    peak_n: int
    peak_value: float
    limit_value: float
    max_value: float
    tau: float
    reaches_tau: bool
    threshold_band: tuple[tuple[int, int], ...]
    n_max: int

    def to_dict(self) -> dict:
        return {
            "peak_n": self.peak_n,
            "peak_value": self.peak_value,
            "limit": self.limit_value,
            "max_value": self.max_value,
            "tau": self.tau,
            "reaches_tau": self.reaches_tau,
            "threshold_band": [list(r) for r in self.threshold_band],
            "n_max": self.n_max,
        }


def summarize(
    model: FailureModel, tau: float = 0.95, target: int | str = 0
) -> CurveSummary:
    """Peak, limit and ceiling verdict for the unanimous curve of ``model``."""
    if not 0.0 <= tau <= 1.0:
        raise ModelError(f"tau must lie in [0, 1], got {tau!r}")
    target = model.hypothesis_index(target)
    curve = extend_curve(model, target)
    peak_n, peak_value = find_peak(curve)
    reached, top = confidence_ceiling(curve, tau)
    return CurveSummary(
        peak_n=peak_n,
        peak_value=peak_value,
        limit_value=asymptote(model, target),
        max_value=top,
        tau=tau,
        reaches_tau=reached,
        threshold_band=tuple(threshold_runs(curve.values, tau)),
        n_max=curve.n_max,
    )


@dataclass(frozen=True)
class ConvictionBand:
    n: int
    ks: tuple[int, ...]
    values: tuple[float, ...]

    @property
    def points(self) -> list[tuple[int, float]]:
        return list(zip(self.ks, self.values))

    @property
    def min_k(self) -> int:
        return self.ks[int(np.argmin(self.values))]

    @property
    def min_value(self) -> float:
        return min(self.values)


def conviction_band(
    model: FailureModel, n: int, k_min: int, k_max: int, target: int | str = 0
) -> ConvictionBand:
    """Posteriors for every vote count in ``[k_min, k_max]`` out of ``n``.

    ``min_value`` is the weakest confidence with which a conviction inside
    the band can be reached.
    """
    if not 0 <= k_min <= k_max <= n:
        raise ModelError(f"need 0 <= k_min <= k_max <= n, got {k_min}, {k_max}, {n}")
    target = model.hypothesis_index(target)
    ks = tuple(range(k_min, k_max + 1))
    values = tuple(
        float(posterior(model, Evidence(n, k)).hypothesis_marginal[target]) for k in ks
    )
    return ConvictionBand(n, ks, values)
