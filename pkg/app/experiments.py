import csv
import hashlib
import itertools
import logging
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from enum import Enum
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator

from app.errors import ConfigError, MitigationError
from app.gates import (
    Circuit,
    HardwareGateModel,
    I4,
    circuit_unitary,
    cphase_decomposition,
    cphase_gate,
    cz,
    has_single_native_iswap,
    iswap_decomposition,
    iswap_gate,
    resolve_effective,
    single_native_iswap,
    sqrt_iswap_dag,
    u_a,
)
from app.kak import local_invariants, weyl_grid
from app.mitigate import apply_kak_approx, kak_approx, unitary_fidelity
from app.noise import NoiseModel, avg_gate_fidelity, circuit_superop, load_document, op_duration
from app.recompile import LayerKind, OptimizerConfig, recompile

logger = logging.getLogger(__name__)

UNITARY_ONLY = "unitary-only"
NATIVE_MODEL = "native"
IDEAL_BASELINE_GATES = 3

NATIVE_GATES = {"sqrt_iswap_dag": sqrt_iswap_dag, "cz": cz}
# durations used for bookkeeping when the sweep runs without noise
DEFAULT_PRESET = {"sqrt_iswap_dag": "tableI-1", "cz": "tableII-1"}


class StrategyKind(str, Enum):
    NO_MITIGATE = "NoMitigate"
    KAK_APPROX = "KAK-Approx"
    RECOMPILE_FULL = "Recompile"
    RECOMPILE_RZ = "Recompile-RZ"
    LONG_DURATION = "Long"


_LABEL = re.compile(r"^(?:(?P<factor>\d+)XLong|(?P<name>Recompile-RZ|Recompile))-(?P<m>\d+)G$")


class Strategy(BaseModel):
    kind: StrategyKind
    m: int | None = Field(default=None, ge=0, le=6)
    factor: int | None = Field(default=None, ge=1)

    @model_validator(mode="before")
    @classmethod
    def _from_label(cls, data):
        if isinstance(data, str):
            return cls.parse_label(data)
        return data

    @model_validator(mode="after")
    def _check_params(self):
        needs_m = self.kind in (StrategyKind.RECOMPILE_FULL, StrategyKind.RECOMPILE_RZ, StrategyKind.LONG_DURATION)
        if needs_m and self.m is None:
            raise ValueError(f"{self.kind.value} needs a gate budget m")
        if self.kind is StrategyKind.LONG_DURATION and self.factor is None:
            raise ValueError("long-duration baseline needs a duration factor")
        return self

    @staticmethod
    def parse_label(label: str) -> dict:
        label = label.strip()
        if label in (StrategyKind.NO_MITIGATE.value, StrategyKind.KAK_APPROX.value):
            return {"kind": label}
        match = _LABEL.match(label)
        if not match:
            raise ValueError(f"unknown strategy {label!r}")
        if match["factor"]:
            return {"kind": StrategyKind.LONG_DURATION, "factor": int(match["factor"]), "m": int(match["m"])}
        return {"kind": match["name"], "m": int(match["m"])}

    @property
    def label(self) -> str:
        if self.kind is StrategyKind.LONG_DURATION:
            return f"{self.factor}XLong-{self.m}G"
        if self.kind in (StrategyKind.RECOMPILE_FULL, StrategyKind.RECOMPILE_RZ):
            return f"{self.kind.value}-{self.m}G"
        return self.kind.value


class TargetFamily(BaseModel):
    kind: Literal["iswap_grid", "cphase_grid", "weyl_grid"] = "iswap_grid"
    count: int = Field(default=80, ge=1)
    step_divisor: int = Field(default=40, ge=1)
    strict: bool = False


class SweepSpec(BaseModel):
    strategies: list[Strategy]
    target_family: TargetFamily = TargetFamily()
    native: Literal["sqrt_iswap_dag", "cz"] = "sqrt_iswap_dag"
    parasitic_angles_deg: list[float] = [9.0]
    noise: str = UNITARY_ONLY
    seed: int = 0
    restarts: int = Field(default=20, ge=1)
    full: bool = False
    # one native for iSWAP targets at ±π/4 and ±3π/4 in the fixed decompositions
    single_native_special: bool = False

    @model_validator(mode="after")
    def _check_noise(self):
        if self.noise != UNITARY_ONLY:
            try:
                NoiseModel.preset(self.noise)
            except ConfigError as exc:
                raise ValueError(str(exc)) from exc
        return self

    @classmethod
    def from_file(cls, path: str | Path) -> "SweepSpec":
        try:
            return cls.model_validate(load_document(path))
        except ValidationError as exc:
            raise ConfigError(f"invalid sweep spec in {path}: {exc}") from exc

    @property
    def weyl_step(self) -> float:
        return math.pi / (80 if self.full else self.target_family.step_divisor)

    def noise_model(self) -> NoiseModel | None:
        return None if self.noise == UNITARY_ONLY else NoiseModel.preset(self.noise)

    def bookkeeping_model(self) -> NoiseModel:
        return self.noise_model() or NoiseModel.preset(DEFAULT_PRESET[self.native])


@dataclass(frozen=True)
class Target:
    target_id: int
    unitary: np.ndarray
    triple: tuple[float, float, float]
    angle: float | None = None


def build_targets(spec: SweepSpec) -> list[Target]:
    family = spec.target_family
    if family.kind == "weyl_grid":
        points = weyl_grid(spec.weyl_step, strict=family.strict)
        return [Target(i, u_a(*p), p) for i, p in enumerate(points)]
    gate = iswap_gate if family.kind == "iswap_grid" else cphase_gate
    targets = []
    for k in range(1, family.count + 1):
        angle = k * math.pi / family.count
        u = gate(angle)
        targets.append(Target(k - 1, u, local_invariants(u), angle))
    return targets


@dataclass(frozen=True)
class ResultRecord:
    target_id: int
    alpha: float
    beta: float
    gamma: float
    strategy: str
    parasitic_deg: float
    noise_preset: str
    fidelity: float
    n2q: int
    nrx: int
    nrz: int
    duration_ns: float
    converged: bool


CSV_COLUMNS = [f.name for f in fields(ResultRecord)]


def stable_seed(*parts) -> int:
    digest = hashlib.blake2b(repr(parts).encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little") >> 1


_IDEAL_CACHE: dict[tuple, Circuit] = {}


def _ideal_decomposition(target: Target, native: str, m: int, restarts: int, seed: int) -> Circuit:
    key = (native, target.unitary.tobytes(), m, restarts, seed)
    if key not in _IDEAL_CACHE:
        hw = HardwareGateModel(NATIVE_GATES[native]())
        cfg = OptimizerConfig(restarts=restarts, seed=seed)
        _IDEAL_CACHE[key] = recompile(target.unitary, hw, m, LayerKind.FULL, cfg, NATIVE_MODEL).circuit
    return _IDEAL_CACHE[key]


def baseline_circuit(target: Target, spec: SweepSpec, m: int = IDEAL_BASELINE_GATES) -> Circuit:
    """Fixed two-native decomposition where one exists, otherwise an ideal recompilation."""
    family = spec.target_family.kind
    if family == "iswap_grid" and spec.native == "sqrt_iswap_dag":
        if spec.single_native_special and has_single_native_iswap(target.angle):
            return single_native_iswap(target.angle, NATIVE_MODEL)
        return iswap_decomposition(target.angle, NATIVE_MODEL)
    if family == "cphase_grid" and spec.native == "cz":
        return cphase_decomposition(target.angle, NATIVE_MODEL)
    seed = stable_seed(spec.seed, target.target_id, "ideal", m)
    return _ideal_decomposition(target, spec.native, m, spec.restarts, seed)


def _hardware(spec: SweepSpec, psi_deg: float) -> HardwareGateModel:
    ideal = NATIVE_GATES[spec.native]()
    return HardwareGateModel(ideal, cphase_gate(math.radians(psi_deg)), label=f"{spec.native}+cphase({psi_deg}deg)")


def _circuit_for(target: Target, strategy: Strategy, psi_deg: float, spec: SweepSpec, nm: NoiseModel):
    """(circuit, hardware models, converged) for one strategy."""
    noisy = {NATIVE_MODEL: _hardware(spec, psi_deg)}
    if strategy.kind is StrategyKind.NO_MITIGATE:
        return baseline_circuit(target, spec), noisy, True
    if strategy.kind is StrategyKind.KAK_APPROX:
        plan = kak_approx(cphase_gate(math.radians(psi_deg)))
        return apply_kak_approx(baseline_circuit(target, spec), plan, NATIVE_MODEL), noisy, True
    if strategy.kind is StrategyKind.LONG_DURATION:
        duration = strategy.factor * nm.duration("native")
        clean = {NATIVE_MODEL: HardwareGateModel(NATIVE_GATES[spec.native](), I4, duration, f"{strategy.factor}XLong")}
        return baseline_circuit(target, spec, strategy.m), clean, True
    layer_kind = LayerKind.FULL if strategy.kind is StrategyKind.RECOMPILE_FULL else LayerKind.RZ
    cfg = OptimizerConfig(restarts=spec.restarts, seed=stable_seed(spec.seed, target.target_id, strategy.label, psi_deg))
    result = recompile(target.unitary, noisy[NATIVE_MODEL], strategy.m, layer_kind, cfg, NATIVE_MODEL)
    return result.circuit, noisy, result.converged


def evaluate(target: Target, strategy: Strategy, psi_deg: float, spec: SweepSpec) -> ResultRecord:
    nm = spec.noise_model()
    books = spec.bookkeeping_model()
    circuit, hw, converged = _circuit_for(target, strategy, psi_deg, spec, books)
    if nm is None:
        fidelity = unitary_fidelity(target.unitary, circuit_unitary(circuit, resolve_effective(hw)))
    else:
        fidelity = avg_gate_fidelity(target.unitary, circuit_superop(circuit, hw, nm))
    counts = circuit.gate_counts()
    return ResultRecord(
        target_id=target.target_id,
        alpha=target.triple[0],
        beta=target.triple[1],
        gamma=target.triple[2],
        strategy=strategy.label,
        parasitic_deg=float(psi_deg),
        noise_preset=spec.noise,
        fidelity=min(max(fidelity, 0.0), 1.0),
        n2q=counts["n2q"],
        nrx=counts["nrx"],
        nrz=counts["nrz"],
        duration_ns=circuit.duration(lambda op: op_duration(op, hw, books)),
        converged=converged,
    )


def _failure(target: Target, strategy: Strategy, psi: float, exc: Exception) -> dict:
    error = str(exc) if isinstance(exc, MitigationError) else f"{type(exc).__name__}: {exc}"
    return {"target_id": target.target_id, "strategy": strategy.label, "parasitic_deg": psi, "error": error}


def _run_target(args) -> tuple[list[ResultRecord], list[dict]]:
    target, spec = args
    records, failures = [], []
    for strategy, psi in itertools.product(spec.strategies, spec.parasitic_angles_deg):
        try:
            records.append(evaluate(target, strategy, psi, spec))
        except MitigationError as exc:
            logger.warning("target %d %s at %.3g deg failed: %s", target.target_id, strategy.label, psi, exc)
            failures.append(_failure(target, strategy, psi, exc))
        except Exception as exc:
            logger.exception("target %d %s at %.3g deg crashed", target.target_id, strategy.label, psi)
            failures.append(_failure(target, strategy, psi, exc))
    return records, failures


def run_sweep(spec: SweepSpec, workers: int = 1, failures: list[dict] | None = None) -> list[ResultRecord]:
    targets = build_targets(spec)
    logger.info(
        "sweep: %d targets x %d strategies x %d angles, noise %s",
        len(targets),
        len(spec.strategies),
        len(spec.parasitic_angles_deg),
        spec.noise,
    )
    jobs = [(t, spec) for t in targets]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_target, jobs))
    else:
        outcomes = [_run_target(job) for job in jobs]
    records = [r for recs, _ in outcomes for r in recs]
    if failures is not None:
        failures.extend(f for _, fs in outcomes for f in fs)
    records.sort(key=lambda r: (r.target_id, r.strategy, r.parasitic_deg))
    logger.info("sweep finished with %d records", len(records))
    return records


@dataclass(frozen=True)
class Summary:
    strategy: str
    parasitic_deg: float
    count: int
    mean_fidelity: float
    std_fidelity: float
    mean_n2q: float
    mean_nrx: float
    mean_nrz: float
    mean_duration_ns: float


def summarize(records: list[ResultRecord]) -> list[Summary]:
    if not records:
        raise ConfigError("nothing to summarize")
    groups: dict[tuple[str, float], list[ResultRecord]] = {}
    for r in records:
        groups.setdefault((r.strategy, r.parasitic_deg), []).append(r)
    out = []
    for (strategy, angle), group in sorted(groups.items()):
        fid = np.array([r.fidelity for r in group])
        out.append(
            Summary(
                strategy=strategy,
                parasitic_deg=angle,
                count=len(group),
                mean_fidelity=float(fid.mean()),
                std_fidelity=float(fid.std()),
                mean_n2q=float(np.mean([r.n2q for r in group])),
                mean_nrx=float(np.mean([r.nrx for r in group])),
                mean_nrz=float(np.mean([r.nrz for r in group])),
                mean_duration_ns=float(np.mean([r.duration_ns for r in group])),
            )
        )
    return out


@dataclass(frozen=True)
class Crossover:
    strategy_a: str
    strategy_b: str
    angle_deg: float | None


def _first_crossing(angles: list[float], diff: list[float]) -> float | None:
    """First angle where the sign of diff flips.

    A run of exact zeros between opposite signs (or closing the series) crosses at its first point.
    Curves that only touch and separate on the same side, or start out equal, do not cross.
    """
    prev_x, prev_d, touch = None, 0.0, None
    for x, d in zip(angles, diff):
        if d == 0:
            if prev_d != 0 and touch is None:
                touch = x
            continue
        if prev_d * d < 0:
            if touch is not None:
                return touch
            return prev_x + (x - prev_x) * prev_d / (prev_d - d)
        prev_x, prev_d, touch = x, d, None
    return touch


def crossover_report(records: list[ResultRecord]) -> list[Crossover]:
    """Parasitic angle where the mean-fidelity curves of each strategy pair first cross."""
    curves: dict[str, dict[float, float]] = {}
    for s in summarize(records):
        curves.setdefault(s.strategy, {})[s.parasitic_deg] = s.mean_fidelity
    out = []
    for a, b in itertools.combinations(sorted(curves), 2):
        shared = sorted(set(curves[a]) & set(curves[b]))
        diff = [curves[a][x] - curves[b][x] for x in shared]
        out.append(Crossover(a, b, _first_crossing(shared, diff)))
    return out


def report(records: list[ResultRecord]) -> dict:
    return {
        "summary": [asdict(s) for s in summarize(records)],
        "crossovers": [
            {
                "strategy_a": c.strategy_a,
                "strategy_b": c.strategy_b,
                "angle_deg": c.angle_deg if c.angle_deg is not None else "no crossing",
            }
            for c in crossover_report(records)
        ],
    }


def write_csv(records: list[ResultRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_COLUMNS)
        for r in records:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in asdict(r).values()])


def read_csv(path: str | Path) -> list[ResultRecord]:
    types = {f.name: f.type for f in fields(ResultRecord)}
    records = []
    try:
        with open(path, newline="") as f:
            for row in csv.DictReader(f):
                values = {}
                for name in CSV_COLUMNS:
                    raw = row[name]
                    kind = types[name]
                    values[name] = raw == "True" if kind is bool else kind(raw)
                records.append(ResultRecord(**values))
    except (OSError, KeyError, ValueError) as exc:
        raise ConfigError(f"cannot read results from {path}: {exc}") from exc
    return records
