"""Per-cell chemistry on a closed ring and the morphogen-to-angle map.

Each cell holds three quantities: a cubic activator and its fast inhibitor
(the pattern-forming pair) plus a passively diffusing species.  All three
are transported around the ring at a common speed and diffused with
central-difference stencils; time integration is explicit Euler only.
Every update uses only the two neighbouring cells, so the rule is fully
decentralized.
"""

from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from ._kernels import DENOM_CLASSIC_S2, DENOM_PAPER_2S
from .errors import ConfigError, NonFiniteError


@dataclass(frozen=True)
class RingParams:
    """All chemistry parameters plus simulator-only settings.

    gamma_* are diffusion rates, alpha the stimulation rate, beta the
    inhibition rate, v the transport (wave) speed, s the cell length,
    dt the Euler time step.
    """

    gamma_act: float = 1.0
    gamma_inh: float = 370.0
    gamma_pas: float = 1.0
    alpha: float = 0.001
    beta: float = 225.0
    v: float = 1.0
    s: float = 1.0
    dt: float = 0.001
    n_cells: int = 36
    angle_limit: float = 1.9
    init_amplitude: float = 0.01
    seed: int = 1
    diffusion_denominator: str = DENOM_PAPER_2S

    def __post_init__(self):
        if self.dt <= 0:
            raise ConfigError("dt must be positive")
        if self.s <= 0:
            raise ConfigError("cell length s must be positive")
        if self.n_cells < 4:
            raise ConfigError("need at least 4 cells")
        if self.angle_limit <= 0:
            raise ConfigError("angle_limit must be positive")
        if self.init_amplitude < 0:
            raise ConfigError("init_amplitude must be non-negative")
        if self.diffusion_denominator not in (DENOM_PAPER_2S, DENOM_CLASSIC_S2):
            raise ConfigError(
                f"unknown diffusion_denominator {self.diffusion_denominator!r}")
        gmax = max(self.gamma_act, self.gamma_inh, self.gamma_pas)
        # explicit-Euler advection/diffusion guard; reaction stiffness is the
        # caller's responsibility (beta*dt < 2 in practice)
        if self.dt * (gmax / (2 * self.s) + abs(self.v) / (2 * self.s)) >= 1.0:
            raise ConfigError(
                "unstable configuration: dt*(max(gamma)/(2s) + |v|/(2s)) >= 1")

    def with_value(self, name, value):
        """New params with one dynamic parameter replaced."""
        if name not in ("v", "beta", "gamma_act", "gamma_inh", "alpha"):
            raise ConfigError(f"parameter {name!r} is not schedulable")
        return replace(self, **{name: value})


@dataclass
class MorphogenState:
    """Ring state: three length-N circular arrays indexed by cell."""

    q_act: np.ndarray
    q_inh: np.ndarray
    q_pas: np.ndarray

    def __post_init__(self):
        n = len(self.q_act)
        if not (len(self.q_inh) == len(self.q_pas) == n) or n < 4:
            raise ConfigError("state arrays must share one length >= 4")

    @property
    def n_cells(self):
        return len(self.q_act)

    def copy(self):
        return MorphogenState(self.q_act.copy(), self.q_inh.copy(),
                              self.q_pas.copy())


def init_state(params: RingParams) -> MorphogenState:
    """Seeded uniform noise in [-init_amplitude, +init_amplitude] per cell.

    Same (seed, params) always reproduces the same state bit for bit.
    """
    rng = np.random.Generator(np.random.PCG64(params.seed))
    a = params.init_amplitude
    n = params.n_cells
    return MorphogenState(
        rng.uniform(-a, a, n),
        rng.uniform(-a, a, n),
        rng.uniform(-a, a, n),
    )


def _locate_nonfinite(state, step):
    for name in ("q_act", "q_inh", "q_pas"):
        arr = getattr(state, name)
        bad = np.flatnonzero(~np.isfinite(arr))
        if bad.size:
            return NonFiniteError(int(bad[0]), name, step)
    return NonFiniteError(-1, "unknown", step)


def step_morphogens(state: MorphogenState, params: RingParams,
                    disabled=frozenset()) -> MorphogenState:
    """One explicit Euler step of the coupled transport/diffusion/reaction.

    Disabled cells run chemistry like everyone else; failure only affects
    actuation downstream.  The argument exists so callers can validate the
    set in one place.
    """
    return run_chemistry(state, params, 1, disabled)


def run_chemistry(state: MorphogenState, params: RingParams, n_steps: int,
                  disabled=frozenset()) -> MorphogenState:
    """Advance n_steps in the compiled kernel; raises NonFiniteError on blowup."""
    n = state.n_cells
    for idx in disabled:
        if not (0 <= idx < n):
            raise ConfigError(f"disabled index {idx} out of range")
    if n != params.n_cells:
        raise ConfigError("state length does not match params.n_cells")
    out = state.copy()
    bad = _kernels.step_chunk(
        out.q_act, out.q_inh, out.q_pas,
        float(params.v), float(params.gamma_act), float(params.gamma_inh),
        float(params.gamma_pas), float(params.alpha), float(params.beta),
        float(params.s), float(params.dt), int(n_steps),
        params.diffusion_denominator == DENOM_PAPER_2S,
    )
    if bad >= 0:
        raise _locate_nonfinite(out, bad)
    return out


def morphogen_to_angles(state: MorphogenState, params: RingParams) -> np.ndarray:
    """Goal joint angles: passive plus activator, clamped to the servo limit."""
    lim = params.angle_limit
    return np.clip(state.q_pas + state.q_act, -lim, lim)


def total_passive(state: MorphogenState) -> float:
    """Sum of the passive species over the ring (conservation diagnostic)."""
    return float(np.sum(state.q_pas))
