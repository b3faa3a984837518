"""Game representations for team-symmetric games.

A game has m >= 2 teams; players within a team are interchangeable and
share a payoff function.  Because payoffs are invariant under within-team
permutations, they depend on each team's action *counts* only, so the
canonical representation is a tensor indexed by joint count vectors
rather than by per-player action profiles.  The per-player ("full form")
representation is kept for validation and for oracle tests.

Actions are 0-indexed.  Count vectors for a team with k actions are
length-k tuples of non-negative integers; enumeration order is ascending
lexicographic everywhere.
"""

from __future__ import annotations

import itertools
import json
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, SymmetryViolation, ZeroSumRequiresTwoTeams

# Exhaustive permutation checking is capped at this many within-team
# permutations; beyond it a deterministic sample of adjacent
# transpositions (which generate the within-team groups) is used.
_EXHAUSTIVE_PERMUTATION_LIMIT = 10_000

_FLOAT_TOL = 1e-12


@dataclass(frozen=True)
class TeamStructure:
    """Shape of a team game: how many teams, players per team, actions per team."""

    team_sizes: tuple[int, ...]
    action_counts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "team_sizes", tuple(int(s) for s in self.team_sizes))
        object.__setattr__(self, "action_counts", tuple(int(k) for k in self.action_counts))
        if len(self.team_sizes) != len(self.action_counts):
            raise DimensionMismatch(
                f"{len(self.team_sizes)} team sizes but {len(self.action_counts)} action counts"
            )
        if self.m < 2:
            raise ValueError("a team game needs at least two teams")
        if any(s < 1 for s in self.team_sizes):
            raise ValueError("every team needs at least one player")
        if any(k < 2 for k in self.action_counts):
            raise ValueError("every team needs at least two actions")

    @property
    def m(self) -> int:
        return len(self.team_sizes)

    @property
    def total_players(self) -> int:
        return sum(self.team_sizes)

    def player_team(self, player: int) -> int:
        """Team index of a player under team-by-team player ordering."""
        running = 0
        for i, size in enumerate(self.team_sizes):
            running += size
            if player < running:
                return i
        raise IndexError(f"player {player} out of range for {self.total_players} players")

    def team_members(self, team: int) -> range:
        start = sum(self.team_sizes[:team])
        return range(start, start + self.team_sizes[team])

    def count_lengths(self) -> tuple[int, ...]:
        """Number of feasible count vectors per team."""
        return tuple(
            math.comb(n + k - 1, k - 1) for n, k in zip(self.team_sizes, self.action_counts)
        )


@lru_cache(maxsize=None)
def feasible_count_vectors(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    """All length-k non-negative integer vectors summing to n, ascending lexicographic."""
    if n < 0 or k < 1:
        raise ValueError(f"need n >= 0 and k >= 1, got n={n}, k={k}")
    if k == 1:
        return ((n,),)
    out = []
    for first in range(n + 1):
        for rest in feasible_count_vectors(n - first, k - 1):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def count_index(n: int, k: int) -> dict[tuple[int, ...], int]:
    """Map from count vector to its position in the canonical enumeration."""
    return {c: i for i, c in enumerate(feasible_count_vectors(n, k))}


def counts_of_actions(actions: Sequence[int], k: int) -> tuple[int, ...]:
    """Tally a list of action indices into a length-k count vector."""
    counts = [0] * k
    for a in actions:
        counts[a] += 1
    return tuple(counts)


@dataclass(frozen=True)
class PayoffTensor:
    """Count-form game: joint count vectors -> one payoff per team.

    ``values`` has shape ``(L_1, ..., L_m, m)`` where ``L_i`` is the number
    of feasible count vectors for team i, axes ordered by team, entries
    ordered canonically.  Treated as immutable after construction.
    """

    structure: TeamStructure
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        expected = self.structure.count_lengths() + (self.structure.m,)
        if values.shape != expected:
            raise DimensionMismatch(f"payoff array shape {values.shape}, expected {expected}")
        if not np.all(np.isfinite(values)):
            raise ValueError("payoff entries must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def entry(self, counts: Sequence[Sequence[int]]) -> np.ndarray:
        """Team payoffs at a joint count tuple."""
        idx = tuple(
            count_index(n, k)[tuple(c)]
            for c, n, k in zip(counts, self.structure.team_sizes, self.structure.action_counts)
        )
        return self.values[idx]

    def joint_counts(self):
        """Iterate (counts, payoffs) pairs in canonical order."""
        per_team = [
            feasible_count_vectors(n, k)
            for n, k in zip(self.structure.team_sizes, self.structure.action_counts)
        ]
        for idx in np.ndindex(*self.structure.count_lengths()):
            counts = tuple(per_team[j][i] for j, i in enumerate(idx))
            yield counts, self.values[idx]

    def to_dict(self) -> dict:
        entries = [
            {"counts": [list(c) for c in counts], "payoffs": [float(p) for p in payoffs]}
            for counts, payoffs in self.joint_counts()
        ]
        return {
            "m": self.structure.m,
            "team_sizes": list(self.structure.team_sizes),
            "action_counts": list(self.structure.action_counts),
            "entries": entries,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PayoffTensor":
        structure = TeamStructure(tuple(data["team_sizes"]), tuple(data["action_counts"]))
        if data.get("m", structure.m) != structure.m:
            raise ValueError("declared m does not match team_sizes")
        shape = structure.count_lengths() + (structure.m,)
        values = np.full(shape, np.nan)
        seen = set()
        for entry in data["entries"]:
            counts = tuple(tuple(int(c) for c in team) for team in entry["counts"])
            idx = tuple(
                count_index(n, k).get(c)
                for c, n, k in zip(counts, structure.team_sizes, structure.action_counts)
            )
            if any(i is None for i in idx):
                raise ValueError(f"infeasible count tuple {counts}")
            if idx in seen:
                raise ValueError(f"duplicate entry for counts {counts}")
            seen.add(idx)
            payoffs = entry["payoffs"]
            if len(payoffs) != structure.m:
                raise ValueError(f"entry {counts} has {len(payoffs)} payoffs, expected {structure.m}")
            values[idx] = payoffs
        if np.isnan(values).any():
            raise ValueError("missing entries: not every feasible count tuple is present")
        return cls(structure, values)


def save_game(game: PayoffTensor, path) -> None:
    with open(path, "w") as fh:
        json.dump(game.to_dict(), fh, indent=2)
        fh.write("\n")


def load_game(path) -> PayoffTensor:
    with open(path) as fh:
        return PayoffTensor.from_dict(json.load(fh))


@dataclass(frozen=True)
class FullFormGame:
    """Per-player game: action profile -> one payoff per player.

    ``payoffs`` has shape ``(k_{t(1)}, ..., k_{t(n)}, n)`` with one axis per
    player (players ordered team by team) plus a trailing player axis.
    """

    structure: TeamStructure
    payoffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        payoffs = np.asarray(self.payoffs, dtype=float)
        expected = self.profile_shape() + (self.structure.total_players,)
        if payoffs.shape != expected:
            raise DimensionMismatch(f"payoff array shape {payoffs.shape}, expected {expected}")
        if not np.all(np.isfinite(payoffs)):
            raise ValueError("payoff entries must be finite")
        payoffs.setflags(write=False)
        object.__setattr__(self, "payoffs", payoffs)

    def profile_shape(self) -> tuple[int, ...]:
        return tuple(
            k
            for k, size in zip(self.structure.action_counts, self.structure.team_sizes)
            for _ in range(size)
        )

    def profiles(self):
        return np.ndindex(*self.profile_shape())

    def player_payoff(self, profile: tuple[int, ...], player: int) -> float:
        return float(self.payoffs[profile + (player,)])


def _within_team_permutations(structure: TeamStructure):
    """All within-team player permutations as tuples phi with phi[i] = image of i."""
    per_team = [
        [perm for perm in itertools.permutations(structure.team_members(t))]
        for t in range(structure.m)
    ]
    for combo in itertools.product(*per_team):
        phi = [0] * structure.total_players
        for team, perm in enumerate(combo):
            for src, dst in zip(structure.team_members(team), perm):
                phi[src] = dst
        yield tuple(phi)


def _adjacent_transpositions(structure: TeamStructure):
    """Identity-based swaps of each adjacent same-team player pair."""
    identity = list(range(structure.total_players))
    for team in range(structure.m):
        members = list(structure.team_members(team))
        for a, b in zip(members, members[1:]):
            phi = identity.copy()
            phi[a], phi[b] = b, a
            yield tuple(phi)


def _payoffs_equal(a, b, integral: bool) -> bool:
    if integral:
        return a == b
    return abs(a - b) <= _FLOAT_TOL * max(1.0, abs(a), abs(b))


def _is_integral(values: np.ndarray) -> bool:
    return bool(np.all(values == np.round(values)))


def check_common_payoff(game: FullFormGame, return_witness: bool = False):
    """True iff same-team players receive equal payoffs at every profile."""
    integral = _is_integral(game.payoffs)
    for profile in game.profiles():
        row = game.payoffs[profile]
        for team in range(game.structure.m):
            members = list(game.structure.team_members(team))
            first = row[members[0]]
            for other in members[1:]:
                if not _payoffs_equal(first, row[other], integral):
                    if return_witness:
                        return False, (profile, (members[0], other))
                    return False
    if return_witness:
        return True, None
    return True


def check_team_symmetry(game: FullFormGame, return_witness: bool = False):
    """True iff within-team player permutations leave the payoff map invariant.

    Checks u_{phi(i)}(a) == u_i(a_{phi(1)}, ..., a_{phi(n)}) for every
    profile and player.  Exhaustive over all within-team permutations when
    their number is at most 10,000; otherwise over every adjacent same-team
    transposition (the generators of the within-team groups).
    """
    structure = game.structure
    n_perms = math.prod(math.factorial(s) for s in structure.team_sizes)
    if n_perms <= _EXHAUSTIVE_PERMUTATION_LIMIT:
        perms = _within_team_permutations(structure)
    else:
        perms = _adjacent_transpositions(structure)
    integral = _is_integral(game.payoffs)
    n = structure.total_players
    for phi in perms:
        for profile in game.profiles():
            permuted = tuple(profile[phi[j]] for j in range(n))
            for player in range(n):
                lhs = game.payoffs[profile + (phi[player],)]
                rhs = game.payoffs[permuted + (player,)]
                if not _payoffs_equal(lhs, rhs, integral):
                    if return_witness:
                        return False, (profile, phi)
                    return False
    if return_witness:
        return True, None
    return True


def _profile_counts(structure: TeamStructure, profile: tuple[int, ...]):
    counts = []
    for team in range(structure.m):
        members = structure.team_members(team)
        counts.append(
            counts_of_actions([profile[p] for p in members], structure.action_counts[team])
        )
    return tuple(counts)


def reduce_to_count_form(game: FullFormGame) -> PayoffTensor:
    """Collapse a common-payoff team-symmetric game to its count-form tensor.

    Raises SymmetryViolation with a witness if the game is not
    common-payoff within teams or not team-symmetric.
    """
    ok, witness = check_common_payoff(game, return_witness=True)
    if not ok:
        profile, pair = witness
        raise SymmetryViolation(
            f"players {pair[0]} and {pair[1]} are in the same team but receive "
            f"different payoffs at profile {profile}",
            profile=profile,
            witness=pair,
        )
    ok, witness = check_team_symmetry(game, return_witness=True)
    if not ok:
        profile, phi = witness
        raise SymmetryViolation(
            f"within-team permutation {phi} changes payoffs at profile {profile}",
            profile=profile,
            witness=phi,
        )
    structure = game.structure
    shape = structure.count_lengths() + (structure.m,)
    values = np.zeros(shape)
    firsts = [structure.team_members(t)[0] for t in range(structure.m)]
    per_team = [
        feasible_count_vectors(n, k)
        for n, k in zip(structure.team_sizes, structure.action_counts)
    ]
    for idx in np.ndindex(*structure.count_lengths()):
        counts = [per_team[j][i] for j, i in enumerate(idx)]
        # representative profile: within each team, actions sorted ascending
        profile = tuple(
            a
            for team_counts in counts
            for a, c in enumerate(team_counts)
            for _ in range(c)
        )
        values[idx] = [game.payoffs[profile + (firsts[t],)] for t in range(structure.m)]
    return PayoffTensor(structure, values)


def expand_to_full_form(game: PayoffTensor) -> FullFormGame:
    """Expand a count-form tensor to the per-player representation."""
    structure = game.structure
    shape = tuple(
        k
        for k, size in zip(structure.action_counts, structure.team_sizes)
        for _ in range(size)
    ) + (structure.total_players,)
    payoffs = np.zeros(shape)
    for profile in np.ndindex(*shape[:-1]):
        counts = _profile_counts(structure, profile)
        team_payoffs = game.entry(counts)
        payoffs[profile] = [
            team_payoffs[structure.player_team(p)] for p in range(structure.total_players)
        ]
    return FullFormGame(structure, payoffs)


def gen_random_game(
    structure: TeamStructure,
    lo: int,
    hi: int,
    zero_sum: bool = False,
    seed: int = 0,
) -> PayoffTensor:
    """Random integer-payoff game: each entry drawn uniformly from [lo, hi].

    With ``zero_sum`` (two teams only) team 2's payoff is the negation of
    team 1's; otherwise every team's payoff is drawn independently.
    Deterministic given the seed.
    """
    if lo > hi:
        raise ValueError(f"need lo <= hi, got [{lo}, {hi}]")
    if zero_sum and structure.m != 2:
        raise ZeroSumRequiresTwoTeams(f"zero-sum generation needs m=2, got m={structure.m}")
    rng = np.random.default_rng(seed)
    shape = structure.count_lengths() + (structure.m,)
    values = np.zeros(shape)
    for idx in np.ndindex(*structure.count_lengths()):
        if zero_sum:
            v = float(rng.integers(lo, hi + 1))
            values[idx] = [v, -v]
        else:
            values[idx] = [float(rng.integers(lo, hi + 1)) for _ in range(structure.m)]
    return PayoffTensor(structure, values)


def gmp_game(omega: float) -> PayoffTensor:
    """Generalized matching pennies: two teams of two, two actions (H=0, T=1).

    Zero-sum; for 0 < omega < 1 the game has a unique equilibrium, which is
    mixed.  Values outside that range are accepted with a warning.
    """
    if not 0.0 < omega < 1.0:
        warnings.warn(
            f"omega={omega} is outside (0, 1); the unique-mixed-equilibrium "
            "guarantee no longer applies",
            RuntimeWarning,
            stacklevel=2,
        )
    structure = TeamStructure((2, 2), (2, 2))
    # row/column labels by count vector: HH=(2,0), HT/TH=(1,1), TT=(0,2)
    table = {
        ((2, 0), (2, 0)): 1.0,
        ((2, 0), (1, 1)): omega,
        ((2, 0), (0, 2)): -1.0,
        ((1, 1), (2, 0)): -omega,
        ((1, 1), (1, 1)): 0.0,
        ((1, 1), (0, 2)): -omega,
        ((0, 2), (2, 0)): -1.0,
        ((0, 2), (1, 1)): omega,
        ((0, 2), (0, 2)): 1.0,
    }
    values = np.zeros(structure.count_lengths() + (2,))
    vecs = feasible_count_vectors(2, 2)
    for i, g1 in enumerate(vecs):
        for j, g2 in enumerate(vecs):
            u1 = table[(g1, g2)]
            values[i, j] = [u1, -u1]
    return PayoffTensor(structure, values)


@dataclass(frozen=True)
class LinearPayoffSpec:
    """Coefficients of a payoff linear in action counts.

    ``coeffs[k][j]`` weights the number of team-k agents playing action j;
    the induced payoff sum is shared by every team.
    """

    structure: TeamStructure
    coeffs: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        coeffs = tuple(tuple(float(c) for c in row) for row in self.coeffs)
        if len(coeffs) != self.structure.m:
            raise DimensionMismatch(f"{len(coeffs)} coefficient rows for {self.structure.m} teams")
        for team, row in enumerate(coeffs):
            if len(row) != self.structure.action_counts[team]:
                raise DimensionMismatch(
                    f"team {team} has {self.structure.action_counts[team]} actions "
                    f"but {len(row)} coefficients"
                )
        if not all(math.isfinite(c) for row in coeffs for c in row):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "coeffs", coeffs)


def linear_game(spec: LinearPayoffSpec, team_coeffs: Sequence[LinearPayoffSpec] | None = None) -> PayoffTensor:
    """Build the count-form tensor of a linear-in-counts game.

    By default every team receives the same value sum(c[k][j] * g_k[j]).
    ``team_coeffs`` (one spec per team) switches to per-team coefficient
    tables, an extension beyond the shared-coefficient case.
    """
    structure = spec.structure
    if team_coeffs is not None:
        if len(team_coeffs) != structure.m:
            raise DimensionMismatch(f"need {structure.m} per-team specs, got {len(team_coeffs)}")
        tables = [ts.coeffs for ts in team_coeffs]
    else:
        tables = None
    per_team = [
        feasible_count_vectors(n, k)
        for n, k in zip(structure.team_sizes, structure.action_counts)
    ]
    values = np.zeros(structure.count_lengths() + (structure.m,))
    for idx in np.ndindex(*structure.count_lengths()):
        counts = [per_team[j][i] for j, i in enumerate(idx)]

        def value_for(table):
            return sum(
                table[k][j] * counts[k][j]
                for k in range(structure.m)
                for j in range(structure.action_counts[k])
            )

        if tables is None:
            v = value_for(spec.coeffs)
            values[idx] = [v] * structure.m
        else:
            values[idx] = [value_for(tables[i]) for i in range(structure.m)]
    return PayoffTensor(structure, values)
