import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from app.config import settings
from app.dto.responses import KakResponse, MitigateResponse, RecompileResponse
from app.errors import MitigationError
from app.experiments import SweepSpec, read_csv, report, run_sweep, write_csv
from app.gates import HardwareGateModel, parse_angle, parse_gate_spec
from app.kak import kak_decompose
from app.logs import setup_logging
from app.mitigate import kak_approx
from app.noise import load_document
from app.recompile import LayerKind, OptimizerConfig, expressivity_scan, recompile

logger = logging.getLogger(__name__)


def _gate(source: str):
    path = Path(source)
    if path.suffix in (".json", ".toml") and path.exists():
        data = load_document(path)
        return parse_gate_spec(data["matrix"] if isinstance(data, dict) else data)
    return parse_gate_spec(source)


def _optimizer(args) -> OptimizerConfig:
    return OptimizerConfig(restarts=args.restarts, seed=args.seed, gradient=args.gradient)


def cmd_kak(args):
    print(KakResponse.from_decomposition(kak_decompose(_gate(args.matrix))).model_dump_json(indent=2))


def cmd_mitigate(args):
    print(MitigateResponse.from_plan(kak_approx(_gate(args.parasitic))).model_dump_json(indent=2))


def cmd_recompile(args):
    hw = HardwareGateModel(_gate(args.native), _gate(args.parasitic))
    result = recompile(_gate(args.target), hw, args.max_gates, LayerKind(args.layers), _optimizer(args))
    if args.circuit_out:
        Path(args.circuit_out).write_text(result.circuit.to_text() + "\n")
    print(RecompileResponse.from_result(result).model_dump_json(indent=2))


def cmd_scan(args):
    hw = HardwareGateModel(_gate(args.native), _gate(args.parasitic))
    step = parse_angle("pi/80") if args.full else parse_angle(args.grid_step)
    records = expressivity_scan(hw, step, args.m, LayerKind(args.layers), _optimizer(args), args.workers)
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(out)
        writer.writerow(["alpha", "beta", "gamma", "m", "infidelity", "native_count"])
        for r in records:
            writer.writerow([repr(r.alpha), repr(r.beta), repr(r.gamma), r.m, repr(r.infidelity), r.native_count])
    finally:
        if out is not sys.stdout:
            out.close()


def cmd_sweep(args):
    spec = SweepSpec.from_file(args.spec)
    if args.full:
        spec = spec.model_copy(update={"full": True})
    failures: list[dict] = []
    records = run_sweep(spec, args.workers, failures)
    write_csv(records, args.out)
    logger.info("wrote %d records to %s", len(records), args.out)
    if failures:
        logger.warning("%d evaluations failed", len(failures))
        json.dump(failures, sys.stderr, indent=2)


def cmd_report(args):
    print(json.dumps(report(read_csv(args.input)), indent=2))


def cmd_serve(args):
    import uvicorn

    uvicorn.run(
        app="app.api.server:app",
        workers=1,
        host=args.host,
        port=args.port,
        reload=args.reload
    )


def _add_optimizer_args(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--gradient", choices=["analytic", "central"], default="analytic")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pcm", description="Parasitic two-qubit gate error mitigation")
    parser.add_argument("--log-level", default=settings.log_level)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kak", help="KAK decomposition of a two-qubit gate")
    p.add_argument("matrix", help="matrix file (JSON/TOML) or gate spec such as iswap:0.785")
    p.set_defaults(func=cmd_kak)

    p = sub.add_parser("mitigate", help="single-qubit correction for a parasitic gate")
    p.add_argument("--parasitic", required=True)
    p.set_defaults(func=cmd_mitigate)

    p = sub.add_parser("recompile", help="decompose a target into noisy native gates")
    p.add_argument("--target", required=True)
    p.add_argument("--native", default="sqrt_iswap_dag")
    p.add_argument("--parasitic", default="identity")
    p.add_argument("--max-gates", type=int, default=3)
    p.add_argument("--layers", choices=[k.value for k in LayerKind], default="full")
    p.add_argument("--circuit-out")
    _add_optimizer_args(p)
    p.set_defaults(func=cmd_recompile)

    p = sub.add_parser("scan", help="expressivity over the Weyl chamber")
    p.add_argument("--native", default="sqrt_iswap_dag")
    p.add_argument("--parasitic", default="identity")
    p.add_argument("--grid-step", default="pi/40")
    p.add_argument("--full", action="store_true", help="use the pi/80 grid")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--layers", choices=[k.value for k in LayerKind], default="full")
    p.add_argument("--workers", type=int, default=settings.workers)
    p.add_argument("--out")
    _add_optimizer_args(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("sweep", help="run a mitigation sweep")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--full", action="store_true")
    p.add_argument("--workers", type=int, default=settings.workers)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="summary and crossovers of a sweep CSV")
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="run the HTTP API")
    p.add_argument("--host", default=settings.host)
    p.add_argument("--port", type=int, default=settings.port)
    p.add_argument("--reload", action="store_true")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)
    try:
        args.func(args)
    except MitigationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0
