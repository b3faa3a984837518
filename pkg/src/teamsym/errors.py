"""Exception types shared across the package."""


class TeamSymError(Exception):
    """Base class for package errors."""


class DimensionMismatch(TeamSymError, ValueError):
    """Vector or matrix dimensions do not match the game structure."""


class SymmetryViolation(TeamSymError, ValueError):
    """A game fails a common-payoff or team-symmetry precondition.

    Carries a witness: the offending action profile plus either a pair of
    same-team players with unequal payoffs or a within-team permutation
    that changes the payoffs.
    """

    def __init__(self, message, profile=None, witness=None):
        super().__init__(message)
        self.profile = profile
        self.witness = witness


class ZeroSumRequiresTwoTeams(TeamSymError, ValueError):
    """Zero-sum generation was requested for a game with m != 2 teams."""


class TooLarge(TeamSymError, ValueError):
    """Brute-force enumeration would exceed the safety budget."""


class NoEquilibriumFound(TeamSymError, RuntimeError):
    """The solver exhausted its budget without a verified equilibrium.

    This indicates a bug or an over-tight tolerance; a team-symmetric
    equilibrium always exists for the games this package accepts.
    """


class NonFiniteGradient(TeamSymError, ValueError):
    """An optimizer step received NaN or infinite gradients."""


class InvalidAction(TeamSymError, ValueError):
    """An environment step received an out-of-range action index."""


class EmptyEquilibriumSet(TeamSymError, ValueError):
    """A metric was asked to score against an empty set of equilibria."""
