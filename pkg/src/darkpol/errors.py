"""Exception types shared across the package."""


class DarkpolError(Exception):
    """Base class for all package-specific errors."""


class IntegrationError(DarkpolError):
    """A time integration violated a state invariant beyond tolerance."""

    def __init__(self, message, t=None):
        if t is not None:
            message = f"{message} (at t = {t:.6g} us)"
        super().__init__(message)
        self.t = t


class DegenerateRootsError(DarkpolError):
    """Characteristic roots too close for the residue formulas.

    Perturb the drive parameters slightly to lift the degeneracy.
    """


class UnsupportedRegimeError(DarkpolError):
    """A closed-form result was requested outside its derivation regime."""


class ConstraintInfeasibleError(DarkpolError):
    """A constrained search has an empty feasible set."""


class ConfigError(DarkpolError):
    """Invalid run configuration (unknown key, bad value, missing scenario)."""
