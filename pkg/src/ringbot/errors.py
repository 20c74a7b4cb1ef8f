"""Exception types shared across the simulator."""


class RingbotError(Exception):
    """Base class for all simulator errors."""


class ConfigError(RingbotError):
    """Invalid parameter set or malformed config file."""


class NonFiniteError(RingbotError):
    """A morphogen update produced NaN/Inf (integration instability).

    Carries the offending cell index, species name and the first bad step.
    """

    def __init__(self, cell, species, step, detail=""):
        self.cell = cell
        self.species = species
        self.step = step
        msg = f"non-finite value in {species} at cell {cell} (step {step})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class NoConvergenceError(RingbotError):
    """Closure projection ran out of iterations.

    ``best_angles`` holds the last iterate, ``residual`` its constraint
    violation; the caller decides whether to accept it.
    """

    def __init__(self, best_angles, residual, iterations):
        self.best_angles = best_angles
        self.residual = residual
        self.iterations = iterations
        super().__init__(
            f"closure projection did not converge after {iterations} "
            f"iterations (residual {residual:.3e})"
        )


class InfeasibleClosureError(NoConvergenceError):
    """Closure unreachable because too many joints are frozen."""


class DegenerateShapeError(RingbotError):
    """Shape collapsed onto its centroid; polar profile undefined."""


class DegenerateConfigurationError(RingbotError):
    """All centered points are zero; rigid registration undefined."""


class DegeneratePolygonError(RingbotError):
    """Polygon has zero perimeter; turning function undefined."""


class DegenerateXError(RingbotError):
    """Linear fit requested on x values with zero spread."""


class TooShortError(RingbotError):
    """Time series too short for differentiation."""
