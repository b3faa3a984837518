"""Expected payoffs under team-symmetric mixed profiles.

A team-symmetric profile assigns one mixed strategy per team; every
member of the team mixes independently with it, so a team's action counts
follow a multinomial distribution.  The focal-agent payoff of (team i,
action a) fixes one team-i agent on action a and draws the remaining
n_i - 1 teammates (and all other teams in full) multinomially.

``brute_force_payoff`` recomputes the same quantities by enumerating
every joint pure action profile; it is the independent oracle the fast
path is tested against.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, TooLarge
from .games import PayoffTensor, TeamStructure, counts_of_actions, feasible_count_vectors, count_index
from .games import LinearPayoffSpec

# Exact integer coefficients below this team size; log-space above it.
_LOG_SPACE_THRESHOLD = 20

_BRUTE_FORCE_MAX_PLAYERS = 12
_BRUTE_FORCE_MAX_PROFILES = 10**7


def pure_strategy(k: int, action: int) -> np.ndarray:
    """Probability vector putting all mass on one action."""
    if not 0 <= action < k:
        raise DimensionMismatch(f"action {action} out of range for {k} actions")
    x = np.zeros(k)
    x[action] = 1.0
    return x


def uniform_profile(structure: TeamStructure) -> list[np.ndarray]:
    return [np.full(k, 1.0 / k) for k in structure.action_counts]


def validate_profile(structure: TeamStructure, profile: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Check per-team strategy dimensions and simplex membership."""
    if len(profile) != structure.m:
        raise DimensionMismatch(f"{len(profile)} strategies for {structure.m} teams")
    out = []
    for team, (x, k) in enumerate(zip(profile, structure.action_counts)):
        x = np.asarray(x, dtype=float)
        if x.shape != (k,):
            raise DimensionMismatch(f"team {team} strategy has shape {x.shape}, expected ({k},)")
        if np.any(x < -1e-12) or abs(x.sum() - 1.0) > 1e-12:
            raise ValueError(f"team {team} strategy is not a probability vector: {x}")
        out.append(x)
    return out


def multinomial_pmf(counts: Sequence[int], n: int, p: Sequence[float]) -> float:
    """P[multinomial(n, p) = counts], with the 0^0 = 1 convention."""
    counts = tuple(int(c) for c in counts)
    p = np.asarray(p, dtype=float)
    if len(counts) != len(p):
        raise DimensionMismatch(f"{len(counts)} counts vs {len(p)} probabilities")
    if sum(counts) != n:
        raise DimensionMismatch(f"counts {counts} sum to {sum(counts)}, expected {n}")
    if n <= _LOG_SPACE_THRESHOLD:
        coef = math.factorial(n)
        for c in counts:
            coef //= math.factorial(c)
        prob = 1.0
        for c, q in zip(counts, p):
            prob *= q**c
        return coef * prob
    # log space: skip zero-count terms so p_j = 0 contributes nothing
    log_val = math.lgamma(n + 1)
    for c, q in zip(counts, p):
        log_val -= math.lgamma(c + 1)
        if c > 0:
            if q <= 0.0:
                return 0.0
            log_val += c * math.log(q)
    return math.exp(log_val)


@lru_cache(maxsize=None)
def _counts_matrix(n: int, k: int) -> np.ndarray:
    mat = np.array(feasible_count_vectors(n, k), dtype=np.int64)
    mat.setflags(write=False)
    return mat


@lru_cache(maxsize=None)
def _coef_vector(n: int, k: int) -> np.ndarray:
    vecs = feasible_count_vectors(n, k)
    coefs = np.empty(len(vecs))
    for i, counts in enumerate(vecs):
        c = math.factorial(n)
        for g in counts:
            c //= math.factorial(g)
        coefs[i] = float(c)
    coefs.setflags(write=False)
    return coefs


def _pmf_vector(n: int, k: int, p: np.ndarray) -> np.ndarray:
    """Multinomial pmf over all feasible count vectors, canonical order."""
    counts = _counts_matrix(n, k)
    if n <= _LOG_SPACE_THRESHOLD:
        return _coef_vector(n, k) * np.prod(p**counts, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        logp = np.log(p)
    terms = np.where(counts > 0, counts * logp, 0.0)
    lgamma = np.vectorize(lambda c: math.lgamma(c + 1))
    log_coef = math.lgamma(n + 1) - lgamma(counts).sum(axis=1)
    return np.exp(log_coef + terms.sum(axis=1))


def _pmf_grad_matrix(n: int, k: int, p: np.ndarray) -> np.ndarray:
    """d pmf(counts; n, p) / d p_b for every count vector; shape (L, k)."""
    counts = _counts_matrix(n, k)
    coef = _coef_vector(n, k)
    powers = p**counts  # (L, k), 0^0 -> 1
    grad = np.zeros((len(counts), k))
    for b in range(k):
        rest = np.prod(np.delete(powers, b, axis=1), axis=1)
        cb = counts[:, b]
        exp = np.where(cb > 0, cb - 1, 0)
        own = np.where(cb > 0, cb * p[b] ** exp, 0.0)
        grad[:, b] = coef * own * rest
    return grad


@lru_cache(maxsize=None)
def _add_action_index(n: int, k: int) -> np.ndarray:
    """Position of (reduced counts + e_a) in the full enumeration; shape (L_reduced, k)."""
    reduced = feasible_count_vectors(n - 1, k)
    full_index = count_index(n, k)
    out = np.empty((len(reduced), k), dtype=np.int64)
    for i, counts in enumerate(reduced):
        for a in range(k):
            shifted = tuple(c + (1 if j == a else 0) for j, c in enumerate(counts))
            out[i, a] = full_index[shifted]
    out.setflags(write=False)
    return out


def _contract(values: np.ndarray, weights: list[np.ndarray]) -> float:
    out = values
    for w in reversed(weights):
        out = out @ w
    return float(out)


def team_action_payoff(
    game: PayoffTensor, team: int, action: int, profile: Sequence[np.ndarray]
) -> float:
    """Expected payoff of one team-`team` agent playing `action` while everyone
    else samples from the profile (teammates with n_i - 1 multinomial draws)."""
    structure = game.structure
    profile = validate_profile(structure, profile)
    n_t, k_t = structure.team_sizes[team], structure.action_counts[team]
    if not 0 <= action < k_t:
        raise DimensionMismatch(f"action {action} out of range for team {team} ({k_t} actions)")
    values = np.take(
        game.values[..., team], _add_action_index(n_t, k_t)[:, action], axis=team
    )
    weights = []
    for j in range(structure.m):
        n_j, k_j = structure.team_sizes[j], structure.action_counts[j]
        if j == team:
            weights.append(_pmf_vector(n_j - 1, k_j, profile[j]))
        else:
            weights.append(_pmf_vector(n_j, k_j, profile[j]))
    return _contract(values, weights)


def mixed_payoff(game: PayoffTensor, team: int, profile: Sequence[np.ndarray]) -> float:
    """Expected payoff of a team-`team` agent when everyone mixes per the profile."""
    structure = game.structure
    profile = validate_profile(structure, profile)
    weights = [
        _pmf_vector(n_j, k_j, profile[j])
        for j, (n_j, k_j) in enumerate(zip(structure.team_sizes, structure.action_counts))
    ]
    return _contract(game.values[..., team], weights)


def linear_team_action_payoff(
    spec: LinearPayoffSpec, team: int, action: int, profile: Sequence[np.ndarray]
) -> float:
    """Closed form of the focal-agent payoff for linear-in-counts games:
    c[i][a] + (n_i - 1) * sum_j c[i][j] x_i[j] + sum_{k != i} n_k * sum_j c[k][j] x_k[j]."""
    structure = spec.structure
    profile = validate_profile(structure, profile)
    total = spec.coeffs[team][action]
    for k in range(structure.m):
        weight = structure.team_sizes[k] - 1 if k == team else structure.team_sizes[k]
        total += weight * float(np.dot(spec.coeffs[k], profile[k]))
    return total


def brute_force_payoff(
    game: PayoffTensor,
    team: int,
    profile: Sequence[np.ndarray],
    action: int | None = None,
) -> float:
    """Exact expectation by enumerating every joint pure action profile.

    With ``action`` set, one team-`team` agent is pinned to that action and
    the rest mix; otherwise all agents mix.  Independent of the multinomial
    fast path on purpose: probabilities come from per-player products.
    """
    structure = game.structure
    profile = validate_profile(structure, profile)
    n = structure.total_players
    n_profiles = math.prod(
        k**s for k, s in zip(structure.action_counts, structure.team_sizes)
    )
    if n > _BRUTE_FORCE_MAX_PLAYERS or n_profiles > _BRUTE_FORCE_MAX_PROFILES:
        raise TooLarge(
            f"{n} players / {n_profiles} joint profiles exceed the enumeration budget"
        )
    player_probs = []
    for t in range(structure.m):
        for idx in range(structure.team_sizes[t]):
            if t == team and action is not None and idx == 0:
                player_probs.append(pure_strategy(structure.action_counts[t], action))
            else:
                player_probs.append(profile[t])
    total = 0.0
    ranges = [range(len(p)) for p in player_probs]
    for joint in itertools.product(*ranges):
        prob = 1.0
        for a, p in zip(joint, player_probs):
            prob *= p[a]
        if prob == 0.0:
            continue
        counts = []
        for t in range(structure.m):
            members = structure.team_members(t)
            counts.append(
                counts_of_actions([joint[p] for p in members], structure.action_counts[t])
            )
        total += prob * float(game.entry(counts)[team])
    return total
