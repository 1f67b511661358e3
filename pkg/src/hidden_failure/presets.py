"""Ready-made models for the pot, line-up, Sanhedrin and Rabin-Miller scenarios."""

from __future__ import annotations

import inspect
from typing import Callable

import numpy as np

from .errors import ModelError
from .model import FailureModel


def _check_prob(**params: float) -> None:
    for name, value in params.items():
        if not 0.0 <= value <= 1.0:
            raise ModelError(f"{name} must lie in [0, 1], got {value!r}")


def _independent_prior(p_first: float, p_fail: float) -> np.ndarray:
    """Joint prior with hypothesis and failure state independent."""
    hyp = np.array([p_first, 1.0 - p_first])
    state = np.array([1.0 - p_fail, p_fail])
    return np.outer(hyp, state)


def pot_model(
    p_c: float = 1e-2, p_e: float = 0.3, theta_contaminated: float = 0.9
) -> FailureModel:
    """Roman pot: British clay tests positive, contaminated pots test positive regardless.

    Origin is a priori 50/50 and independent of contamination (rate ``p_c``).
    """
    _check_prob(p_c=p_c, p_e=p_e, theta_contaminated=theta_contaminated)
    return FailureModel(
        ("Britain", "Italy"),
        ("nominal", "contaminated"),
        _independent_prior(0.5, p_c),
        [[1.0 - p_e, theta_contaminated], [p_e, theta_contaminated]],
    )


def pot_asymmetric_prior_model(
    p_c: float = 1e-2,
    p_e: float = 0.3,
    theta_contaminated: float = 0.9,
    british_share: float = 0.8,
) -> FailureModel:
    """Pot model where a fraction ``british_share`` of contaminated pots are British."""
    _check_prob(
        p_c=p_c, p_e=p_e, theta_contaminated=theta_contaminated,
        british_share=british_share,
    )
    prior = [
        [(1.0 - p_c) / 2, p_c * british_share],
        [(1.0 - p_c) / 2, p_c * (1.0 - british_share)],
    ]
    return FailureModel(
        ("Britain", "Italy"),
        ("nominal", "contaminated"),
        prior,
        [[1.0 - p_e, theta_contaminated], [p_e, theta_contaminated]],
    )


def pot_asymmetric_response_model(
    p_c: float = 1e-2,
    p_e: float = 0.3,
    theta_contaminated_british: float = 0.9,
    theta_contaminated_italian: float = 0.85,
) -> FailureModel:
    """Pot model where contamination leaves a weak origin signal.

    Under unanimous positives the curve first drops toward 0.5 as contamination
    becomes likely, then climbs to 1 once the weaker test has enough data.
    """
    _check_prob(
        p_c=p_c, p_e=p_e,
        theta_contaminated_british=theta_contaminated_british,
        theta_contaminated_italian=theta_contaminated_italian,
    )
    return FailureModel(
        ("Britain", "Italy"),
        ("nominal", "contaminated"),
        _independent_prior(0.5, p_c),
        [
            [1.0 - p_e, theta_contaminated_british],
            [p_e, theta_contaminated_italian],
        ],
    )


def lineup_false_positive(selection_rate: float, lineup_size: int) -> float:
    """False identification rate of an innocent suspect under random filler choice."""
    return selection_rate / lineup_size


def lineup_model(
    p_c: float = 1e-2,
    p_fn: float = 0.48,
    selection_rate: float = 0.8,
    lineup_size: int = 6,
    theta_biased: float = 0.9,
) -> FailureModel:
    """Identity parade with a possibly biased line-up.

    An innocent suspect is picked with probability ``selection_rate / lineup_size``
    in a fair parade; a biased parade (probability ``p_c``) picks the suspect
    with probability ``theta_biased`` whatever their guilt.
    """
    _check_prob(
        p_c=p_c, p_fn=p_fn, selection_rate=selection_rate, theta_biased=theta_biased
    )
    if isinstance(lineup_size, bool) or int(lineup_size) != lineup_size or lineup_size < 1:
        raise ModelError(f"lineup_size must be a positive integer, got {lineup_size!r}")
    p_fp = lineup_false_positive(selection_rate, int(lineup_size))
    return FailureModel(
        ("guilty", "innocent"),
        ("fair", "biased"),
        _independent_prior(0.5, p_c),
        [[1.0 - p_fn, theta_biased], [p_fp, theta_biased]],
    )


def sanhedrin_model(
    p_c: float = 1e-2,
    false_positive: float = 0.14,
    false_negative: float = 0.25,
    theta_biased: float = 0.95,
) -> FailureModel:
    """Panel of judges voting independently; a contaminated trial yields guilty votes."""
    _check_prob(
        p_c=p_c, false_positive=false_positive, false_negative=false_negative,
        theta_biased=theta_biased,
    )
    return FailureModel(
        ("guilty", "innocent"),
        ("fair", "contaminated"),
        _independent_prior(0.5, p_c),
        [[1.0 - false_negative, theta_biased], [false_positive, theta_biased]],
    )


def rabin_miller_model(
    p_f: float = 2.6e-13, prime_density: float = 1e-3, pass_rate: float = 0.25
) -> FailureModel:
    """Rabin-Miller on random numbers, where a fault makes every iteration pass.

    Each iteration passes a prime with certainty and a composite with
    probability ``pass_rate`` (the worst-case bound).  Not suitable for
    adversarially chosen inputs; see :mod:`hidden_failure.crypto` for that.
    """
    _check_prob(p_f=p_f, prime_density=prime_density, pass_rate=pass_rate)
    return FailureModel(
        ("prime", "composite"),
        ("nominal", "fault"),
        _independent_prior(prime_density, p_f),
        [[1.0, 1.0], [pass_rate, 1.0]],
    )


# Stable identifiers used on the command line.
SCENARIOS: dict[str, Callable[..., FailureModel]] = {
    "pot": pot_model,
    "pot-asymmetric-prior": pot_asymmetric_prior_model,
    "pot-asymmetric-response": pot_asymmetric_response_model,
    "lineup": lineup_model,
    "sanhedrin": sanhedrin_model,
    "rabin-miller": rabin_miller_model,
}


def build_scenario(name: str, **overrides) -> FailureModel:
    """Construct a preset by name; ``overrides`` must be parameters of that preset."""
    try:
        factory = SCENARIOS[name]
    except KeyError:
        raise ModelError(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}") from None
    allowed = inspect.signature(factory).parameters
    unknown = sorted(set(overrides) - set(allowed))
    if unknown:
        raise ModelError(
            f"scenario {name!r} has no parameter(s) {unknown}; "
            f"accepted: {sorted(allowed)}"
        )
    return factory(**overrides)


def scenario_parameters(name: str) -> dict[str, object]:
    """Default parameter values of a named preset."""
    factory = SCENARIOS[name]
    return {
        p.name: p.default for p in inspect.signature(factory).parameters.values()
    }
