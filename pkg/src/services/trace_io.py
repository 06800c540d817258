"""
TRACE assembly, export and re-import.

A TraceBundle evaluates every diagnostic series of a path on its lattice.
Bundles are written either as one CSV file per trace type or as a single JSON
document, always via a temporary file renamed into place.
"""
import json
import logging
import math
import os
import tempfile
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd

from src.errors import DataError, EstimationError, ExportError, RenderError
from src.models.canonical import CanonicalForm
from src.models.paths import ShrinkagePath
from src.models.risk import RiskMode
from src.models.traces import TRACE_TYPES, FavorabilityReport, TraceBundle
from src.services.risk_lab import excess_eigen, neg2_log_lr, relative_mse_diag, risk_estimates
from src.services.shrink_paths import path_coefficients
from src.tracing import get_tracer, instrument_function

logger = logging.getLogger(__name__)
tracer = get_tracer()


@instrument_function(tracer, "assemble_traces")
def assemble_traces(cf: CanonicalForm, path: ShrinkagePath, mode: RiskMode = RiskMode.ML) -> TraceBundle:
    """
    Evaluate all TRACE series on a path's lattice.

    Args:
        cf: Canonical form the path was built from
        path: Shrinkage path
        mode: Bias-vector convention for the risk series

    Returns:
        TraceBundle
    """
    mode = RiskMode(mode)
    size = path.size
    coef = path_coefficients(cf, path)

    if cf.exact_fit:
        logger.warning("Exact fit: relative MSE, excess eigenvalue and inferior direction series are undefined")
        rmse = np.full((size, cf.p), np.nan)
        exev = np.full((size, cf.p), np.nan)
        infd: List[Optional[np.ndarray]] = [None] * size
    else:
        estimates = risk_estimates(cf, mode)
        rmse = np.array([relative_mse_diag(cf, d, estimates=estimates) for d in path.deltas])
        eigen = [excess_eigen(cf, d, estimates=estimates) for d in path.deltas]
        exev = np.array([e.eigenvalues for e in eigen])
        infd = [e.inferior_direction for e in eigen]

    if path.lr_values is not None:
        lr = np.array(path.lr_values)
    else:
        lr = np.array([neg2_log_lr(cf, d) for d in path.deltas])

    onset = next((m for m, d in zip(path.lattice, infd) if d is not None), None)
    logger.info(
        f"Assembled {path.kind.value} traces ({mode.value} mode) on {size} lattice points; "
        f"inferior direction onset: {'none' if onset is None else f'm={onset:.3f}'}"
    )
    return TraceBundle(
        path=path,
        mode=mode,
        x_names=cf.x_names,
        coef=coef,
        spat=path.deltas,
        rmse=rmse,
        exev=exev,
        infd=infd,
        lr=lr,
        exact_fit=cf.exact_fit,
    )


def trace_series(bundle: TraceBundle, trace_type: str) -> tuple[List[str], np.ndarray]:
    """
    Column labels and lattice-by-series values of one trace type.

    Args:
        bundle: Trace bundle
        trace_type: One of coef, spat, rmse, exev, infd, lr

    Returns:
        (labels, values) with absent inferior directions as NaN rows
    """
    p = bundle.p
    if trace_type in ("coef", "spat", "rmse"):
        return list(bundle.x_names), np.array(getattr(bundle, trace_type))
    if trace_type == "exev":
        return [f"ev{j + 1}" for j in range(p)], np.array(bundle.exev)
    if trace_type == "infd":
        rows = [np.full(p, np.nan) if d is None else np.array(d) for d in bundle.infd]
        return [f"infd{j + 1}" for j in range(p)], np.array(rows).reshape(bundle.path.size, p)
    if trace_type == "lr":
        return ["lr"], np.array(bundle.lr)[:, None]
    raise RenderError(f"Unknown trace type '{trace_type}'; expected one of {', '.join(TRACE_TYPES)}")


def trace_frame(bundle: TraceBundle, trace_type: str) -> pd.DataFrame:
    """Trace series as a DataFrame whose first column is the m-extent."""
    labels, values = trace_series(bundle, trace_type)
    frame = pd.DataFrame(values, columns=labels)
    frame.insert(0, "m", np.array(bundle.lattice))
    return frame


def _atomic_write(path: Path, text: str):
    """Write text to a sibling temporary file, then rename it over path."""
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except OSError:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_text(path: Path | str, text: str) -> Path:
    """Atomically write a text artifact, surfacing failures as ExportError."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        _atomic_write(path, text)
    except OSError as e:
        raise ExportError(path, e.strerror or str(e)) from e
    return path


def _json_number(value: float):
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return float(value)


def _json_array(values) -> list:
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 0:
        return _json_number(float(arr))
    return [_json_array(v) for v in arr]


def bundle_document(bundle: TraceBundle) -> dict:
    """JSON-ready document mirroring a TraceBundle with its knot metadata."""
    path = bundle.path
    return {
        "kind": path.kind.value,
        "mode": bundle.mode.value,
        "p": path.p,
        "steps": path.steps,
        "xNames": list(bundle.x_names),
        "mStar": _json_number(path.m_star),
        "deltaStar": _json_array(path.delta_star),
        "q": path.q,
        "knotIndex": path.knot_index,
        "degenerate": path.degenerate,
        "lattice": _json_array(path.lattice),
        "coef": _json_array(bundle.coef),
        "spat": _json_array(bundle.spat),
        "rmse": _json_array(bundle.rmse),
        "exev": _json_array(bundle.exev),
        "infd": [None if d is None else _json_array(d) for d in bundle.infd],
        "lr": _json_array(bundle.lr),
    }


@instrument_function(tracer, "export_traces")
def export_traces(bundle: TraceBundle, fmt: str, destination: Path | str) -> List[Path]:
    """
    Write a trace bundle to disk.

    Args:
        bundle: Trace bundle
        fmt: "csv" (one file per trace type) or "json" (one document)
        destination: Output directory, created if missing

    Returns:
        Paths of the written files
    """
    destination = Path(destination)
    kind = bundle.path.kind.value

    if fmt == "csv":
        written = []
        for trace_type in TRACE_TYPES:
            text = trace_frame(bundle, trace_type).to_csv(index=False, na_rep="", lineterminator="\n")
            written.append(write_text(destination / f"{kind}_{trace_type}.csv", text))
    elif fmt == "json":
        text = json.dumps(bundle_document(bundle), indent=2) + "\n"
        written = [write_text(destination / f"{kind}_traces.json", text)]
    else:
        raise ExportError(destination, f"unsupported format '{fmt}'")

    logger.info(f"Exported {len(written)} {fmt} file(s) to {destination}")
    return written


def load_trace_csv(path: Path | str) -> pd.DataFrame:
    """
    Read an exported trace CSV back into a DataFrame.

    Args:
        path: File written by export_traces

    Returns:
        DataFrame with "m" first; "inf" cells become infinity and empty cells NaN
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"Trace file not found: {path}")
    frame = pd.read_csv(path, float_precision="round_trip")
    if frame.columns[0] != "m":
        raise DataError(f"{path} is not a trace file (first column is '{frame.columns[0]}')")
    return frame


def favorability(bundle: TraceBundle) -> FavorabilityReport:
    """
    Judge whether shrinkage beyond m = 1 is favourable.

    Args:
        bundle: Trace bundle with defined risk series

    Returns:
        FavorabilityReport
    """
    if bundle.exact_fit:
        raise EstimationError("Favorability is undefined for an exact fit")

    lattice = np.array(bundle.lattice)
    m_risk_min = float(lattice[int(np.argmin(np.sum(bundle.rmse, axis=1)))])
    present = [m for m, d in zip(lattice, bundle.infd) if d is not None]
    onset = float(present[0]) if present else None
    clean_to_one = all(d is None for m, d in zip(lattice, bundle.infd) if m <= 1.0)

    return FavorabilityReport(
        m_risk_min=m_risk_min,
        m_inferior_onset=onset,
        favorable=m_risk_min > 1.0 and clean_to_one,
    )
