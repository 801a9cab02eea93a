import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Literal

import numpy as np
from pydantic import BaseModel, Field
from scipy.optimize import minimize

from app.errors import OptimizerError
from app.gates import Circuit, GateOp, HardwareGateModel, I4, circuit_unitary, rx, rz, u_a
from app.kak import weyl_grid
from app.linalg import X, Z, check_unitary, dagger, lift
from app.mitigate import wrap_angle

logger = logging.getLogger(__name__)

MAX_NATIVE_GATES = 6
EMITTED_ANGLE_ATOL = 1e-9


class LayerKind(str, Enum):
    FULL = "full"
    RZ = "rz"


class OptimizerConfig(BaseModel):
    restarts: int = Field(default=20, ge=1)
    tolerance: float = 1e-8
    stop_cost: float = 1e-9
    gtol: float = 1e-10
    max_iter: int = Field(default=2000, ge=1)
    gradient: Literal["analytic", "central"] = "analytic"
    fd_step: float = 1e-7
    seed: int = 0


_GENERATORS = {(axis, q): -0.5j * lift(p, q) for axis, p in (("Z", Z), ("X", X)) for q in (0, 1)}


@dataclass(frozen=True)
class Ansatz:
    """layer, then (native, layer) repeated native_count times."""

    native_count: int
    layer_kind: LayerKind = LayerKind.FULL

    @property
    def axes(self) -> tuple[str, ...]:
        return ("Z", "X", "Z") if self.layer_kind is LayerKind.FULL else ("Z",)

    @property
    def n_params(self) -> int:
        return 2 * (self.native_count + 1) * len(self.axes)

    def _layer_steps(self, layer: int):
        """(position in layer, axis, qubit, parameter index) in time order."""
        per_layer = 2 * len(self.axes)
        for j, axis in enumerate(self.axes):
            for q in (0, 1):
                yield j, axis, q, layer * per_layer + q * len(self.axes) + j

    def factors(self, params: np.ndarray, native: np.ndarray) -> list[tuple[np.ndarray, int | None, np.ndarray | None]]:
        """Time-ordered (matrix, parameter index, generator G) with dF/dθ = G·F for rotations."""
        out = []
        for layer in range(self.native_count + 1):
            if layer:
                out.append((native, None, None))
            for _, axis, q, idx in self._layer_steps(layer):
                one = rz(params[idx]) if axis == "Z" else rx(params[idx])
                out.append((lift(one, q), idx, _GENERATORS[(axis, q)]))
        return out

    def unitary(self, params: np.ndarray, native: np.ndarray) -> np.ndarray:
        u = I4.copy()
        for f, _, _ in self.factors(params, native):
            u = f @ u
        return u

    def circuit(self, params: np.ndarray, model: str = "native") -> Circuit:
        c = Circuit()
        for layer in range(self.native_count + 1):
            if layer:
                c = c.then(GateOp.native(model))
            for position, axis in enumerate(self.axes):
                ops = []
                for j, _, q, idx in self._layer_steps(layer):
                    angle = wrap_angle(float(params[idx]))
                    if j == position and abs(angle) > EMITTED_ANGLE_ATOL:
                        ops.append(GateOp.rz(q, angle) if axis == "Z" else GateOp.rx(q, angle))
                if ops:
                    c = c.then(*ops)
        return c

    def padded_params(self, params: np.ndarray) -> np.ndarray:
        """Parameters of a smaller ansatz, zero angles for the layers it lacks."""
        out = np.zeros(self.n_params)
        out[: len(params)] = params
        return out


def infidelity(target: np.ndarray, actual: np.ndarray) -> float:
    return float((4 - abs(np.trace(dagger(target) @ actual)) ** 2 / 4) / 5)


def _cost_and_grad(params, ansatz: Ansatz, target_dag: np.ndarray, native: np.ndarray):
    factors = ansatz.factors(params, native)
    prefixes = []
    u = I4.copy()
    for f, _, _ in factors:
        u = f @ u
        prefixes.append(u)
    tr = np.trace(target_dag @ u)
    cost = (4 - abs(tr) ** 2 / 4) / 5
    grad = np.zeros(len(params))
    back = target_dag.copy()
    for k in range(len(factors) - 1, -1, -1):
        f, idx, gen = factors[k]
        if idx is not None:
            dtr = np.trace(back @ gen @ prefixes[k])
            grad[idx] = -0.1 * (np.conj(tr) * dtr).real
        back = back @ f
    return cost, grad


def _cost(params, ansatz: Ansatz, target_dag: np.ndarray, native: np.ndarray) -> float:
    return float((4 - abs(np.trace(target_dag @ ansatz.unitary(params, native))) ** 2 / 4) / 5)


def _objective(ansatz: Ansatz, target: np.ndarray, native: np.ndarray, cfg: OptimizerConfig):
    target_dag = dagger(target)

    def central(params):
        cost = _cost(params, ansatz, target_dag, native)
        grad = np.empty(len(params))
        for i in range(len(params)):
            step = np.zeros(len(params))
            step[i] = cfg.fd_step
            grad[i] = (
                _cost(params + step, ansatz, target_dag, native) - _cost(params - step, ansatz, target_dag, native)
            ) / (2 * cfg.fd_step)
        return cost, grad

    def analytic(params):
        return _cost_and_grad(params, ansatz, target_dag, native)

    fun = analytic if cfg.gradient == "analytic" else central

    def checked(params):
        cost, grad = fun(params)
        if not np.isfinite(cost) or not np.all(np.isfinite(grad)):
            raise OptimizerError(f"non-finite cost {cost} at parameters {params}")
        return cost, grad

    return checked


@dataclass
class FitResult:
    params: np.ndarray
    cost: float
    restarts_used: int


def _fit(
    ansatz: Ansatz,
    target: np.ndarray,
    native: np.ndarray,
    cfg: OptimizerConfig,
    rng: np.random.Generator,
    warm_start: np.ndarray | None = None,
) -> FitResult:
    fun = _objective(ansatz, target, native, cfg)

    def stop(intermediate_result):
        if intermediate_result.fun < cfg.stop_cost:
            raise StopIteration

    best: FitResult | None = None
    for restart in range(cfg.restarts):
        if restart == 0 and warm_start is not None:
            x0 = warm_start
        else:
            x0 = rng.uniform(-math.pi, math.pi, ansatz.n_params)
        res = minimize(
            fun,
            x0,
            jac=True,
            method="BFGS",
            callback=stop,
            options={"gtol": cfg.gtol, "maxiter": cfg.max_iter},
        )
        cost = float(fun(res.x)[0])
        logger.debug("m=%d restart %d: cost %.3e (%s)", ansatz.native_count, restart, cost, res.message)
        if best is None or cost < best.cost:
            best = FitResult(np.array(res.x), cost, restart + 1)
        best.restarts_used = restart + 1
        if best.cost <= cfg.tolerance:
            break
    return best


@dataclass(frozen=True)
class RecompileResult:
    circuit: Circuit
    achieved_infidelity: float
    native_gates_used: int
    restarts_used: int
    converged: bool
    params: tuple[float, ...]
    layer_kind: LayerKind


def recompile(
    target,
    hw: HardwareGateModel,
    m_max: int = 3,
    layer_kind: LayerKind = LayerKind.FULL,
    cfg: OptimizerConfig | None = None,
    model: str = "native",
) -> RecompileResult:
    """Fit target with at most m_max applications of hw's effective gate; fewest gates reaching the tolerance wins."""
    cfg = cfg or OptimizerConfig()
    target = check_unitary(target)
    if not 0 <= m_max <= MAX_NATIVE_GATES:
        raise OptimizerError(f"m_max must be within 0..{MAX_NATIVE_GATES}, got {m_max}")
    layer_kind = LayerKind(layer_kind)
    native = hw.effective
    rng = np.random.default_rng(cfg.seed)

    best: tuple[Ansatz, FitResult] | None = None
    restarts = 0
    warm = None
    for m in range(m_max + 1):
        ansatz = Ansatz(m, layer_kind)
        fit = _fit(ansatz, target, native, cfg, rng, warm_start=None if warm is None else ansatz.padded_params(warm))
        restarts += fit.restarts_used
        warm = fit.params
        if best is None or fit.cost < best[1].cost:
            best = (ansatz, fit)
        if best[1].cost <= cfg.tolerance:
            logger.info("converged with %d native gate(s), infidelity %.3e", best[0].native_count, best[1].cost)
            break
    else:
        logger.warning("no decomposition within tolerance up to m=%d, best %.3e", m_max, best[1].cost)

    ansatz, fit = best
    circuit = ansatz.circuit(fit.params, model)
    achieved = infidelity(target, circuit_unitary(circuit, {model: native}))
    return RecompileResult(
        circuit=circuit,
        achieved_infidelity=max(achieved, 0.0),
        native_gates_used=ansatz.native_count,
        restarts_used=restarts,
        converged=achieved <= cfg.tolerance,
        params=tuple(float(p) for p in fit.params),
        layer_kind=layer_kind,
    )


def optimize_local_dressing(
    target, fixed_core, cfg: OptimizerConfig | None = None
) -> tuple[float, tuple[tuple[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]]:
    """Best unitary fidelity of (A⊗B)·core·(C⊗D) against target; returns (fidelity, ((A, B), (C, D)))."""
    cfg = cfg or OptimizerConfig()
    target = check_unitary(target)
    core = check_unitary(fixed_core)
    ansatz = Ansatz(1, LayerKind.FULL)
    exhaustive = cfg.model_copy(update={"tolerance": 0.0, "stop_cost": 1e-13})
    fit = _fit(ansatz, target, core, exhaustive, np.random.default_rng(cfg.seed))

    def layer(offset: int, q: int) -> np.ndarray:
        a, b, c = fit.params[offset + 3 * q : offset + 3 * q + 3]
        return rz(c) @ rx(b) @ rz(a)

    right = (layer(0, 0), layer(0, 1))
    left = (layer(6, 0), layer(6, 1))
    return 1 - fit.cost, (left, right)


@dataclass(frozen=True)
class ScanRecord:
    alpha: float
    beta: float
    gamma: float
    m: int
    infidelity: float
    native_count: int


def _scan_one(args) -> ScanRecord:
    point, native, m, layer_kind, cfg, index = args
    target = u_a(*point)
    child = cfg.model_copy(update={"seed": cfg.seed + index})
    fit = _fit(Ansatz(m, layer_kind), target, native, child, np.random.default_rng(child.seed))
    return ScanRecord(*point, m=m, infidelity=max(fit.cost, 0.0), native_count=m)


def expressivity_scan(
    hw: HardwareGateModel,
    grid_step: float,
    m: int,
    layer_kind: LayerKind = LayerKind.FULL,
    cfg: OptimizerConfig | None = None,
    workers: int = 1,
    strict: bool = False,
) -> list[ScanRecord]:
    """Best infidelity with exactly m native gates for every Weyl-grid point, in grid order."""
    cfg = cfg or OptimizerConfig()
    points = weyl_grid(grid_step, strict=strict)
    jobs = [(p, hw.effective, m, LayerKind(layer_kind), cfg, i) for i, p in enumerate(points)]
    logger.info("scanning %d Weyl-grid targets with m=%d", len(jobs), m)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_scan_one, jobs, chunksize=8))
    return [_scan_one(job) for job in jobs]
