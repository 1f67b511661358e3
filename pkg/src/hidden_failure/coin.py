"""Grid posterior for the heads probability of a possibly biased coin.

The posterior is ``Q**x * (1 - Q)**(n - x) * prior(Q)`` renormalised on a
uniform grid over [0, 1] with the trapezoid rule.  A prior concentrated near
``Q = 0.5`` plays the role of "bias is rare": it takes a lot of lopsided data
before the likelihood overrides it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats
from scipy.integrate import cumulative_trapezoid
from scipy.special import xlog1py, xlogy

from .errors import DegenerateEvidenceError, ModelError

DEFAULT_GRID = 10001
MIN_GRID = 101

PRIOR_KINDS = ("uniform", "beta", "mixture")


@dataclass(frozen=True)
class BiasPrior:
    """Prior over the heads probability.

    ``mixture`` puts ``weight_fair`` on a Beta(c, c) bump around 0.5 (with
    ``c = fair_concentration``) and the rest on a Beta(a, b) background.
    """

    kind: str = "uniform"
    a: float = 1.0
    b: float = 1.0
    weight_fair: float = 0.99
    fair_concentration: float = 500.0
    grid_size: int = DEFAULT_GRID

    def __post_init__(self):
        if self.kind not in PRIOR_KINDS:
            raise ModelError(f"prior kind must be one of {PRIOR_KINDS}, got {self.kind!r}")
        if self.grid_size < MIN_GRID or self.grid_size % 2 == 0:
            raise ModelError(f"grid_size must be odd and >= {MIN_GRID}, got {self.grid_size}")
        # the grid includes both endpoints, where shapes below 1 are infinite
        if self.a < 1 or self.b < 1:
            raise ModelError(f"beta shapes must be >= 1, got a={self.a}, b={self.b}")
        if not 0.0 <= self.weight_fair <= 1.0:
            raise ModelError(f"weight_fair must lie in [0, 1], got {self.weight_fair}")
        if not self.fair_concentration > 0:
            raise ModelError("fair_concentration must be positive")

    @classmethod
    def uniform(cls, grid_size: int = DEFAULT_GRID) -> "BiasPrior":
        return cls("uniform", grid_size=grid_size)

    @classmethod
    def beta(cls, a: float, b: float, grid_size: int = DEFAULT_GRID) -> "BiasPrior":
        return cls("beta", a=a, b=b, grid_size=grid_size)

    @classmethod
    def mixture(
        cls,
        weight_fair: float = 0.99,
        fair_concentration: float = 500.0,
        background: tuple[float, float] = (1.0, 1.0),
        grid_size: int = DEFAULT_GRID,
    ) -> "BiasPrior":
        a, b = background
        return cls(
            "mixture", a=a, b=b, weight_fair=weight_fair,
            fair_concentration=fair_concentration, grid_size=grid_size,
        )

    def grid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.grid_size)

    def log_density(self, q: np.ndarray) -> np.ndarray:
        """Unnormalised log density on ``q``."""
        with np.errstate(divide="ignore"):
            if self.kind == "uniform":
                return np.zeros_like(q)
            background = stats.beta.logpdf(q, self.a, self.b)
            if self.kind == "beta":
                return background
            c = self.fair_concentration
            fair = stats.beta.logpdf(q, c, c)
            return np.logaddexp(
                np.log(self.weight_fair) + fair,
                np.log1p(-self.weight_fair) + background,
            )

    def density(self) -> np.ndarray:
        q = self.grid()
        return _normalise(q, self.log_density(q))


def _normalise(q: np.ndarray, log_density: np.ndarray) -> np.ndarray:
    top = np.max(log_density)
    if not np.isfinite(top):
        raise DegenerateEvidenceError("density is identically zero on the grid")
    dens = np.exp(log_density - top)
    return dens / np.trapezoid(dens, q)


@dataclass(frozen=True)
class BiasPosterior:
    grid: np.ndarray
    density: np.ndarray
    mean: float
    map: float
    credible_interval: tuple[float, float]

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "map": self.map,
            "credible_95": list(self.credible_interval),
        }


def _summarise(q: np.ndarray, dens: np.ndarray) -> BiasPosterior:
    cdf = cumulative_trapezoid(dens, q, initial=0.0)
    cdf /= cdf[-1]
    lo, hi = np.interp([0.025, 0.975], cdf, q)
    q.setflags(write=False)
    dens.setflags(write=False)
    return BiasPosterior(
        grid=q,
        density=dens,
        mean=float(np.trapezoid(q * dens, q)),
        map=float(q[np.argmax(dens)]),
        credible_interval=(float(lo), float(hi)),
    )


def coin_posterior(prior: BiasPrior, n: int, x: int) -> BiasPosterior:
    """Posterior density of the heads probability after ``x`` heads in ``n`` tosses."""
    if n < 0 or not 0 <= x <= n:
        raise ModelError(f"need 0 <= x <= n, got n={n}, x={x}")
    q = prior.grid()
    # exact at Q in {0, 1}: 0 * log(0) terms vanish
    loglik = xlogy(x, q) + xlog1py(n - x, -q)
    dens = _normalise(q, prior.log_density(q) + loglik)
    return _summarise(q, dens)


def prior_as_posterior(prior: BiasPrior) -> BiasPosterior:
    return coin_posterior(prior, 0, 0)


def fair_mass(post: BiasPosterior, epsilon: float) -> float:
    """Posterior probability that the coin is within ``epsilon`` of fair."""
    if not 0.0 < epsilon <= 0.5:
        raise ModelError(f"epsilon must lie in (0, 0.5], got {epsilon!r}")
    lo, hi = 0.5 - epsilon, 0.5 + epsilon
    q, dens = post.grid, post.density
    inside = (q > lo) & (q < hi)
    # window endpoints are interpolated so the result does not jump with the grid
    xs = np.concatenate(([lo], q[inside], [hi]))
    ys = np.concatenate(([np.interp(lo, q, dens)], dens[inside], [np.interp(hi, q, dens)]))
    return float(np.trapezoid(ys, xs))
