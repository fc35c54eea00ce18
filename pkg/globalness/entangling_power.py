"""Entangling power: the most entanglement a bipartite unitary creates from product inputs.

Each pure input factor on C^n is parametrized by n - 1 hyperspherical angles
for the magnitudes and n - 1 relative phases. The maximum is searched with
seeded multistart Nelder-Mead, so the reported value is a numerical lower
bound on the true maximum.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .conf import get_setting
from .entanglement import Bipartition, entanglement_entropy, weights_entropy
from .exceptions import DimensionMismatchError, UsageError
from .linalg import PureState, UnitaryOperator, apply, embed_operator

logger = logging.getLogger(__name__)

LOWER_BOUND = "lower bound (numerical)"


@dataclass(frozen=True)
class OptimizerSettings:
    restarts: int = 64
    seed: int = 0
    step_tol: float = 1e-6
    max_iters: int = 4000

    def __post_init__(self):
        if self.restarts < 1:
            raise UsageError(f"Optimizer needs at least one restart, got {self.restarts}")
        if self.step_tol <= 0 or self.max_iters < 1:
            raise UsageError("step_tol must be positive and max_iters at least 1")

    @classmethod
    def from_settings(cls, **overrides):
        """Defaults from ``settings.GLOBALNESS``; ``None`` overrides are ignored."""
        values = {
            'restarts': get_setting('RESTARTS'),
            'seed': get_setting('SEED'),
            'step_tol': get_setting('STEP_TOL'),
            'max_iters': get_setting('MAX_ITERS'),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass(frozen=True)
class RestartRecord:
    restart: int
    value: float
    best: float


@dataclass(frozen=True, eq=False)
class EntanglingPowerResult:
    value: float
    argmax_state: PureState
    ancilla_assisted: bool
    optimizer_trace: list = field(default_factory=list)
    bound: str = LOWER_BOUND

    def summary(self):
        return {
            'value': round(float(self.value), 12),
            'bound': self.bound,
            'ancilla_assisted': self.ancilla_assisted,
            'restarts': len(self.optimizer_trace),
        }


# =========================
# PARAMETRIZATION
# =========================

def factor_amplitudes(params, n):
    """Unit vector on C^n from 2(n - 1) real parameters."""
    angles, phases = params[:n - 1], params[n - 1:]
    magnitudes = np.ones(n)
    for k, angle in enumerate(angles):
        magnitudes[k] *= np.cos(angle)
        magnitudes[k + 1:] *= np.sin(angle)
    return magnitudes * np.exp(1j * np.concatenate([[0.0], phases]))


def _bipartite_dims(u):
    if isinstance(u, UnitaryOperator):
        if len(u.dims) != 2:
            raise UsageError(f"Entangling power needs a bipartite operator, got dims {u.dims}")
        return u
    matrix = np.asarray(u, dtype=complex)
    d = math.isqrt(matrix.shape[0])
    if d * d != matrix.shape[0]:
        raise DimensionMismatchError(
            f"Cannot infer a d x d split for an operator of size {matrix.shape[0]}")
    return UnitaryOperator(matrix, (d, d))


class _Problem:
    """Product-input entanglement generated by ``u``, optionally with equal-size ancillas.

    With ancillas the input lives on (a, A, B, b), ``u`` acts on (A, B) and
    the entropy is taken across (a, A) : (B, b).
    """

    def __init__(self, u, ancilla):
        self.u = u
        d_a, d_b = u.dims
        self.ancilla = ancilla
        if ancilla:
            self.dims = (d_a, d_a, d_b, d_b)
            self.sizes = (d_a * d_a, d_b * d_b)
            self.operator = embed_operator(u.matrix, (1, 2), self.dims)
        else:
            self.dims = (d_a, d_b)
            self.sizes = (d_a, d_b)
            self.operator = u.matrix
        self.split = 2 * (self.sizes[0] - 1)
        self.n_params = self.split + 2 * (self.sizes[1] - 1)

    def product(self, params):
        left = factor_amplitudes(params[:self.split], self.sizes[0])
        right = factor_amplitudes(params[self.split:], self.sizes[1])
        return np.kron(left, right)

    def entropy(self, params):
        output = (self.operator @ self.product(params)).reshape(self.sizes[0], -1)
        return weights_entropy(np.linalg.svd(output, compute_uv=False) ** 2)

    def state(self, params):
        return PureState.normalized(self.product(params), self.dims)

    def cut(self):
        return Bipartition.split((0, 1) if self.ancilla else (0,), len(self.dims))

    def targets(self):
        return (1, 2) if self.ancilla else (0, 1)


def _search(problem, cfg):
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    options = {'xatol': cfg.step_tol, 'fatol': cfg.step_tol * 1e-3,
               'maxiter': cfg.max_iters, 'adaptive': True}
    objective = lambda x: -problem.entropy(x)
    best_x, best_value, trace = None, -np.inf, []
    for restart, child in enumerate(children):
        rng = np.random.default_rng(child)
        x0 = rng.uniform(0, 2 * np.pi, size=problem.n_params)
        outcome = minimize(objective, x0, method='Nelder-Mead', options=options)
        value = -float(outcome.fun)
        if value > best_value:
            best_x, best_value = outcome.x, value
        trace.append(RestartRecord(restart, value, best_value))
        logger.debug("restart %d: %.9f (best %.9f)", restart, value, best_value)
    polished = minimize(objective, best_x, method='Nelder-Mead',
                        options={**options, 'xatol': cfg.step_tol * 1e-3, 'fatol': 1e-14})
    if -polished.fun > best_value:
        best_x = polished.x
    return best_x, trace


def entangling_power(u, ancilla=False, cfg=None):
    """max over product inputs of E(U rho U^dag) - E(rho), reported as a lower bound."""
    u = _bipartite_dims(u)
    cfg = cfg if cfg is not None else OptimizerSettings.from_settings()
    problem = _Problem(u, ancilla)
    if problem.n_params == 0:
        raise UsageError("Nothing to optimize over")
    best_x, trace = _search(problem, cfg)
    state = problem.state(best_x)
    value = max(entanglement_delta(u, state, problem.cut(), problem.targets()), 0.0)
    logger.info("entangling power %.9f ebit (ancilla=%s, %d restarts)", value, ancilla, cfg.restarts)
    return EntanglingPowerResult(
        value=value,
        argmax_state=state,
        ancilla_assisted=bool(ancilla),
        optimizer_trace=trace,
    )


def entanglement_delta(u, state, cut=None, targets=None):
    """E(U psi) - E(psi) across ``cut``; negative when U disentangles."""
    before = entanglement_entropy(state, cut)
    after = entanglement_entropy(apply(u, state, targets), cut)
    return after - before


# =========================
# GRID ORACLE
# =========================

def _bloch_grid(points):
    thetas = np.linspace(0, np.pi, points)
    phis = np.linspace(0, 2 * np.pi, points, endpoint=False)
    theta, phi = np.meshgrid(thetas, phis, indexing='ij')
    theta, phi = theta.reshape(-1), phi.reshape(-1)
    return np.stack([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], axis=1)


def entangling_power_grid(u, points=25):
    """Dense scan over the four Bloch angles of two-qubit product inputs.

    Returns ``(value, argmax_state)``. An odd ``points`` keeps the equator
    and the poles on the grid.
    """
    u = _bipartite_dims(u)
    if u.dims != (2, 2):
        raise UsageError(f"Grid scan is two-qubit only, got dims {u.dims}")
    singles = _bloch_grid(points)
    inputs = np.einsum('ia,jb->ijab', singles, singles).reshape(-1, 4)
    outputs = (inputs @ u.matrix.T).reshape(-1, 2, 2)
    entropies = weights_entropy(np.linalg.svd(outputs, compute_uv=False) ** 2, axis=1)
    best = int(np.argmax(entropies))
    return float(entropies[best]), PureState.normalized(inputs[best], (2, 2))
