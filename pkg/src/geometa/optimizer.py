"""Riemannian conjugate gradient (Polak-Ribiere+) for the alignment objective."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from . import manifold as mf
from .errors import DimensionMismatchError, LineSearchError, ManifoldError
from .manifold import ProductPoint, TangentVector
from .objective import GramCache, loss, riemannian_grad

log = logging.getLogger(__name__)

GRAD_TOL = "gradient tolerance"
MAX_ITERS = "max iterations"
LS_FAILURE = "line-search failure"

# Gradients this small are round-off, whatever the initial norm was.
_ABS_GRAD_FLOOR = 1e-12
_FEASIBILITY_PERIOD = 25


@dataclass(frozen=True)
class SolverConfig:
    reg_c: float = 1.0
    max_iters: int = 500
    grad_tol: float = 1e-6
    armijo_c1: float = 1e-4
    backtrack_factor: float = 0.5
    max_backtracks: int = 30
    cg_restart_period: int = 25
    seed: int = 0

    def __post_init__(self):
        if self.reg_c < 0:
            raise ValueError("reg_c must be nonnegative")
        if self.max_iters < 0:
            raise ValueError("max_iters must be >= 0")
        if self.grad_tol < 0:
            raise ValueError("grad_tol must be >= 0")
        if not 0 < self.armijo_c1 < 1:
            raise ValueError("armijo_c1 must lie in (0, 1)")
        if not 0 < self.backtrack_factor < 1:
            raise ValueError("backtrack_factor must lie in (0, 1)")
        if self.max_backtracks < 1 or self.cg_restart_period < 1:
            raise ValueError("max_backtracks and cg_restart_period must be positive")


@dataclass
class IterRecord:
    iteration: int
    loss: float
    grad_norm: float
    step: float


@dataclass
class SolveTrace:
    records: list[IterRecord] = field(default_factory=list)
    termination: str = ""

    @property
    def losses(self) -> np.ndarray:
        return np.array([r.loss for r in self.records])

    @property
    def n_steps(self) -> int:
        return max(len(self.records) - 1, 0)

    def to_jsonl(self) -> str:
        lines = [
            json.dumps({"iteration": r.iteration, "loss": r.loss, "grad_norm": r.grad_norm, "step": r.step})
            for r in self.records
        ]
        return "\n".join(lines) + "\n"


def init_identity(d: int) -> ProductPoint:
    if d < 1:
        raise ValueError("d must be >= 1")
    return ProductPoint.identity(d)


def _line_search(point, f0, direction, slope, t0, cache, cfg):
    """Armijo backtracking. Returns (new_point, new_loss, step) or None."""
    t = t0
    for _ in range(cfg.max_backtracks):
        try:
            cand = mf.retract(point, direction, t)
        except ManifoldError:
            t *= cfg.backtrack_factor
            continue
        f = loss(cand, cache, cfg.reg_c)
        if f < f0 and f <= f0 + cfg.armijo_c1 * t * slope:
            return cand, f, t
        t *= cfg.backtrack_factor
    return None


def _repair(point: ProductPoint) -> ProductPoint:
    u, v = point.u, point.v
    if max(mf.orth_error(u), mf.orth_error(v)) <= mf.ORTH_TOL:
        return point
    if mf.orth_error(u) > mf.ORTH_TOL:
        u = mf.retract_orth(u, np.zeros_like(u), 1.0)
    if mf.orth_error(v) > mf.ORTH_TOL:
        v = mf.retract_orth(v, np.zeros_like(v), 1.0)
    return ProductPoint(u, v, mf.sym(point.b))


def solve(
    cache: GramCache, cfg: SolverConfig = SolverConfig(), init: ProductPoint | None = None
) -> tuple[ProductPoint, SolveTrace]:
    """Minimize the alignment loss over O(d) x O(d) x SPD(d).

    Parameters
    ----------
    cache : GramCache
        Second moments of the aligned training pair.
    cfg : SolverConfig
        Stopping rule and line-search settings.
    init : ProductPoint, optional
        Starting point; identities when omitted.

    Returns
    -------
    point, trace
        The final (best) iterate and a per-iteration record.

    Raises
    ------
    LineSearchError
        If not a single descent step can be found from the starting point.
    """
    x = init if init is not None else init_identity(cache.d)
    if x.dim != cache.d:
        raise DimensionMismatchError(f"init has d={x.dim}, data has d={cache.d}")

    trace = SolveTrace()
    f = loss(x, cache, cfg.reg_c)
    g = riemannian_grad(x, cache, cfg.reg_c)
    gg = mf.inner(x, g, g)
    gnorm = float(np.sqrt(max(gg, 0.0)))
    gnorm0 = gnorm
    trace.records.append(IterRecord(0, f, gnorm, 0.0))

    direction = -g
    prev_step = None
    since_restart = 0

    for it in range(1, cfg.max_iters + 1):
        if gnorm <= _ABS_GRAD_FLOOR or gnorm <= cfg.grad_tol * gnorm0:
            trace.termination = GRAD_TOL
            break

        slope = mf.inner(x, g, direction)
        if slope >= 0:
            direction, slope, since_restart = -g, -gg, 0

        t0 = 1.0 / (1.0 + gnorm) if prev_step is None else min(max(2.0 * prev_step, 1e-12), 1.0)
        found = _line_search(x, f, direction, slope, t0, cache, cfg)
        if found is None and since_restart > 0:
            direction, slope, since_restart = -g, -gg, 0
            found = _line_search(x, f, direction, slope, t0, cache, cfg)
        if found is None:
            if it == 1:
                raise LineSearchError(
                    f"no descent step from the initial point (loss={f:.6g}, "
                    f"grad norm={gnorm:.6g}, initial step={t0:.3g}); check data scale and reg_c"
                )
            trace.termination = LS_FAILURE
            break

        x_new, f_new, step = found
        if it % _FEASIBILITY_PERIOD == 0:
            repaired = _repair(x_new)
            if repaired is not x_new:
                f_rep = loss(repaired, cache, cfg.reg_c)
                if f_rep <= f_new:
                    x_new, f_new = repaired, f_rep

        g_new = riemannian_grad(x_new, cache, cfg.reg_c)
        gg_new = mf.inner(x_new, g_new, g_new)
        since_restart += 1
        if since_restart >= cfg.cg_restart_period:
            beta, since_restart = 0.0, 0
        else:
            g_old_t = mf.transport(x, x_new, g)
            beta = max(0.0, (gg_new - mf.inner(x_new, g_new, g_old_t)) / gg)
        direction = -g_new + beta * mf.transport(x, x_new, direction)

        x, f, g, gg = x_new, f_new, g_new, gg_new
        gnorm = float(np.sqrt(max(gg, 0.0)))
        prev_step = step
        trace.records.append(IterRecord(it, f, gnorm, step))
        log.debug("iter %d loss %.10g |grad| %.3e step %.3e", it, f, gnorm, step)
    else:
        if gnorm <= _ABS_GRAD_FLOOR or gnorm <= cfg.grad_tol * gnorm0:
            trace.termination = GRAD_TOL
        else:
            trace.termination = MAX_ITERS

    return x, trace
