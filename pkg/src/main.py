"""
Command-line entry point for shrinkage path analysis.

Usage: python -m src.main {fit,qm,yonx,ellipse,info} [options]
"""
import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from src.config import config
from src.errors import DataError, ShrinkageError
from src.models.canonical import CanonicalForm, StandardizedModel
from src.models.risk import RiskMode
from src.services.datasets import load_dataset
from src.services.inference import confidence_ellipse, ellipse_to_original, inside_region
from src.services.model_core import canonicalize, read_table, standardize
from src.services.risk_lab import lr_critical, q_best_p2, q_search
from src.services.shrink_paths import build_efficient_path, build_qm_path, build_yonx_path
from src.services.svg_render import render_all_traces, render_ellipse, render_trace, render_yonx
from src.services.trace_io import assemble_traces, export_traces, favorability, write_text
from src.tracing import TracingConfig

logger = logging.getLogger(__name__)


def configure_logging(level: str):
    """Send all diagnostics to standard error."""
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )


def _q_value(text: str):
    if text == "best2":
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'best2', got '{text}'")


def _name_list(text: str) -> List[str]:
    names = [name.strip() for name in text.split(",") if name.strip()]
    if not names:
        raise argparse.ArgumentTypeError("expected a comma-separated list of column names")
    return names


def _pair(text: str) -> List[str]:
    names = _name_list(text)
    if len(names) != 2:
        raise argparse.ArgumentTypeError(f"expected exactly two column names, got '{text}'")
    return names


def _levels(text: str) -> List[float]:
    try:
        levels = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated probabilities, got '{text}'")
    if not all(0.0 < level < 1.0 for level in levels):
        raise argparse.ArgumentTypeError("confidence levels must lie strictly between 0 and 1")
    return levels


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got '{text}'")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    settings = config.settings

    common = argparse.ArgumentParser(add_help=False)
    source = common.add_mutually_exclusive_group()
    source.add_argument("--data", type=Path, help="CSV file with a header row")
    source.add_argument("--dataset", default=None, help=f"Bundled dataset (default: {settings.default_dataset})")
    common.add_argument("--y", help="Outcome column (default: first column)")
    common.add_argument("--x", type=_name_list, help="Comma-separated predictor columns (default: all others)")
    common.add_argument("--steps", type=_positive_int, default=settings.steps, help="Lattice points per unit m")
    common.add_argument("--mode", choices=[m.value for m in RiskMode], default=settings.mode, help="Bias-vector convention")
    common.add_argument("--out", type=Path, default=None, help=f"Output directory (default: {settings.output_dir})")
    common.add_argument("--format", choices=["csv", "json"], default=settings.export_format, help="Trace export and summary format")
    common.add_argument("--svg", action="store_true", help="Also write SVG plots")
    common.add_argument("--log-level", default=settings.log_level, help="Logging level")

    parser = argparse.ArgumentParser(prog="shrinkpath", description="Efficient generalized ridge shrinkage paths and TRACE diagnostics")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("fit", parents=[common], help="Efficient path and all TRACE series")

    qm = sub.add_parser("qm", parents=[common], help="q-shape ridge path")
    shape = qm.add_mutually_exclusive_group(required=True)
    shape.add_argument("--q", type=_q_value, help="Shape parameter, or 'best2' for the optimal shape of a 2-predictor model")
    shape.add_argument("--search", action="store_true", help="Search the configured q mesh for the most likely shape")

    sub.add_parser("yonx", parents=[common], help="Simple regression of y on one x")

    ellipse = sub.add_parser("ellipse", parents=[common], help="Confidence ellipses for a coefficient pair")
    ellipse.add_argument("--pair", type=_pair, required=True, help="Two predictor names, e.g. p3cs,p4caf")
    ellipse.add_argument("--levels", type=_levels, default=None, help="Comma-separated confidence levels (default: 0.10,0.90)")
    ellipse.add_argument("--units", choices=["standardized", "original"], default="standardized", help="Coefficient units")

    sub.add_parser("info", parents=[common], help="Canonical-form summary")
    return parser


def load_model(args) -> StandardizedModel:
    """Standardize the requested columns of a CSV file or bundled dataset."""
    if args.data is not None:
        table = read_table(args.data)
    else:
        table = load_dataset(args.dataset or config.settings.default_dataset).to_frame()

    columns = [str(c) for c in table.columns]
    y_name = args.y or columns[0]
    x_names = args.x or [c for c in columns if c != y_name]
    return standardize(table, y_name, x_names)


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, Path):
        return str(value)
    return value


def _text(value: Any) -> str:
    if isinstance(value, (list, tuple, np.ndarray)):
        return "(" + ", ".join(_text(v) for v in value) + ")"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.4f}"
    if value is None:
        return "none"
    return str(value)


def emit(summary: Dict[str, Any], fmt: str):
    """Print a run summary to standard output."""
    if fmt == "json":
        print(json.dumps(_jsonable(summary), indent=2))
        return
    for key, value in summary.items():
        if key == "files":
            for path in value:
                print(f"wrote: {path}")
        else:
            print(f"{key}: {_text(value)}")


def _out_dir(args) -> Path:
    return args.out if args.out is not None else config.settings.output_dir


def _write_svgs(documents: Dict[str, str], out: Path, prefix: str) -> List[Path]:
    return [write_text(out / f"{prefix}_{name}.svg", svg) for name, svg in documents.items()]


def run_fit(args, model: StandardizedModel, cf: CanonicalForm) -> Dict[str, Any]:
    path = build_efficient_path(cf, args.steps)
    bundle = assemble_traces(cf, path, args.mode)
    out = _out_dir(args)
    files = export_traces(bundle, args.format, out)
    if args.svg:
        files += _write_svgs(render_all_traces(bundle), out, path.kind.value)

    summary: Dict[str, Any] = {
        "model": f"{model.y_name} ~ {' + '.join(model.x_names)}",
        "r2": cf.r2,
        "mStar": path.m_star,
        "deltaStar": path.delta_star,
        "degenerate": path.degenerate,
        "exactFit": cf.exact_fit,
    }
    if not cf.exact_fit:
        report = favorability(bundle)
        summary.update(
            mRiskMin=report.m_risk_min,
            mInferiorOnset=report.m_inferior_onset,
            favorable=report.favorable,
        )
    summary["files"] = files
    return summary


def run_qm(args, model: StandardizedModel, cf: CanonicalForm) -> Dict[str, Any]:
    summary: Dict[str, Any] = {"model": f"{model.y_name} ~ {' + '.join(model.x_names)}"}
    if args.search:
        result = q_search(cf, config.q_mesh, args.steps)
        q = result.q_best
        summary["searched"] = len(result.lr_by_q)
    elif args.q == "best2":
        q = q_best_p2(cf)
    else:
        q = args.q

    path = build_qm_path(cf, q, args.steps)
    bundle = assemble_traces(cf, path, args.mode)
    out = _out_dir(args)
    files = export_traces(bundle, args.format, out)
    if args.svg:
        files += _write_svgs(render_all_traces(bundle), out, path.kind.value)
        efficient = assemble_traces(cf, build_efficient_path(cf, args.steps), args.mode)
        files.append(write_text(out / "qm_lr_compare.svg", render_trace(efficient, "lr", compare=bundle)))

    df, level = config.lr_significance
    critical = lr_critical(df, level)
    lr_min = float(path.lr_values[path.knot_index])
    summary.update(
        q=q,
        mStar=path.m_star,
        deltaStar=path.delta_star,
        lrMin=lr_min,
        lrCritical=critical,
        significant=lr_min > critical,
        files=files,
    )
    return summary


def run_yonx(args, model: StandardizedModel, cf: CanonicalForm) -> Dict[str, Any]:
    path = build_yonx_path(model, args.steps)
    bundle = assemble_traces(cf, path, args.mode)
    out = _out_dir(args)
    files = export_traces(bundle, args.format, out)
    if args.svg:
        files += _write_svgs(render_all_traces(bundle), out, path.kind.value)
        files.append(write_text(out / "yonx_fit.svg", render_yonx(model, path)))

    display = path.display
    return {
        "model": f"{model.y_name} ~ {model.x_names[0]}",
        "mStar": path.m_star,
        "deltaStar": path.delta_star,
        "degenerate": path.degenerate,
        "displayM": display.m,
        "slopes": display.slopes,
        "intercepts": display.intercepts,
        "files": files,
    }


def run_ellipse(args, model: StandardizedModel, cf: CanonicalForm) -> Dict[str, Any]:
    missing = [name for name in args.pair if name not in model.x_names]
    if missing:
        raise DataError(f"Pair column(s) {', '.join(missing)} not among the predictors {', '.join(model.x_names)}")
    i, j = (model.x_names.index(name) for name in args.pair)
    levels = args.levels or config.ellipse_levels

    path = build_efficient_path(cf, args.steps)
    spec = confidence_ellipse(cf, i, j, levels, path, config.settings.boundary_points)
    if args.units == "original":
        spec = ellipse_to_original(spec, model)

    files: List[Path] = []
    if args.svg:
        name = f"ellipse_{spec.names[0]}_{spec.names[1]}.svg"
        files.append(write_text(_out_dir(args) / name, render_ellipse(spec)))

    return {
        "pair": list(spec.names),
        "units": spec.units,
        "center": spec.center,
        "levels": spec.levels,
        "thresholds": spec.thresholds,
        "originInside": [inside_region(spec, [0.0, 0.0], level) for level in spec.levels],
        "knot": spec.knot,
        "knotInside": [inside_region(spec, spec.knot, level) for level in spec.levels],
        "files": files,
    }


def run_info(args, model: StandardizedModel, cf: CanonicalForm) -> Dict[str, Any]:
    path = build_efficient_path(cf, args.steps)
    return {
        "model": f"{model.y_name} ~ {' + '.join(model.x_names)}",
        "n": cf.n,
        "p": cf.p,
        "r2": cf.r2,
        "lambda": cf.lam,
        "rho": cf.rho,
        "c": cf.c,
        "fRatios": cf.f_ratios,
        "betaOLS": cf.beta_ols,
        "conditionNumber": math.sqrt(cf.lam[0] / cf.lam[-1]),
        "mStar": path.m_star,
        "deltaStar": path.delta_star,
        "neg2LogLRTerminus": cf.neg2_log_lr_terminus,
    }


COMMANDS = {
    "fit": run_fit,
    "qm": run_qm,
    "yonx": run_yonx,
    "ellipse": run_ellipse,
    "info": run_info,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run one subcommand.

    Args:
        argv: Arguments without the program name (default: sys.argv[1:])

    Returns:
        0 on success, 1 on data or model errors, 2 on usage errors
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    configure_logging(args.log_level)
    TracingConfig(config.settings.tracing_enabled).configure()

    try:
        model = load_model(args)
        cf = canonicalize(model)
        summary = COMMANDS[args.command](args, model, cf)
    except (ShrinkageError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        return 1

    emit(summary, args.format)
    return 0


if __name__ == "__main__":
    sys.exit(main())
