import json
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.errors import DataError, EstimationError, ExportError, RenderError
from src.models.risk import RiskMode
from src.models.traces import TRACE_TYPES
from src.services.shrink_paths import build_efficient_path
from src.services.trace_io import (
    assemble_traces,
    export_traces,
    favorability,
    load_trace_csv,
    trace_frame,
    trace_series,
)


def test_bundle_shapes(portland_bundle, portland_path):
    size = portland_path.size
    assert portland_bundle.coef.shape == (size, 4)
    assert portland_bundle.rmse.shape == (size, 4)
    assert portland_bundle.exev.shape == (size, 4)
    assert len(portland_bundle.infd) == size
    assert portland_bundle.lr.shape == (size,)


def test_ols_row(portland_bundle, portland_cf):
    assert_allclose(portland_bundle.coef[0], portland_cf.beta_ols, atol=1e-12)
    assert_allclose(portland_bundle.spat[0], 1.0)
    relative_variance = np.diag(portland_cf.g @ np.diag(1.0 / portland_cf.lam) @ portland_cf.g.T)
    assert_allclose(portland_bundle.rmse[0], relative_variance, rtol=1e-12)
    assert_allclose(portland_bundle.exev[0], 0.0, atol=1e-12)
    assert portland_bundle.infd[0] is None
    assert math.isinf(portland_bundle.lr[0])


def test_lr_series(portland_bundle, portland_path):
    assert portland_bundle.lr[portland_path.knot_index] == pytest.approx(0.0, abs=1e-6)
    assert portland_bundle.lr[-1] == pytest.approx(52.5, abs=0.1)
    assert np.all(portland_bundle.lr[1:] >= -1e-9)


def test_inferior_direction_present_iff_negative_eigenvalue(portland_bundle):
    for values, direction in zip(portland_bundle.exev, portland_bundle.infd):
        assert (direction is None) == (values.min() >= 0.0)
        if direction is not None:
            assert np.linalg.norm(direction) == pytest.approx(1.0, abs=1e-12)


def test_no_inferior_direction_up_to_one(portland_bundle):
    for m, direction in zip(portland_bundle.lattice, portland_bundle.infd):
        if m <= 1.0:
            assert direction is None


def test_trace_series_labels(portland_bundle):
    assert trace_series(portland_bundle, "coef")[0] == ["p3ca", "p3cs", "p4caf", "p2cs"]
    assert trace_series(portland_bundle, "exev")[0] == ["ev1", "ev2", "ev3", "ev4"]
    assert trace_series(portland_bundle, "infd")[0] == ["infd1", "infd2", "infd3", "infd4"]
    labels, values = trace_series(portland_bundle, "lr")
    assert labels == ["lr"]
    assert values.shape == (portland_bundle.path.size, 1)


def test_absent_inferior_direction_is_nan_row(portland_bundle):
    _, values = trace_series(portland_bundle, "infd")
    assert np.all(np.isnan(values[0]))


def test_unknown_trace_type(portland_bundle):
    with pytest.raises(RenderError, match="Unknown trace type"):
        trace_series(portland_bundle, "vif")


def test_trace_frame_leads_with_m(portland_bundle):
    frame = trace_frame(portland_bundle, "spat")
    assert list(frame.columns) == ["m", "p3ca", "p3cs", "p4caf", "p2cs"]
    assert_allclose(frame["m"], portland_bundle.lattice)


def test_csv_export_round_trip(tmp_path, portland_bundle):
    written = export_traces(portland_bundle, "csv", tmp_path / "out")

    assert sorted(p.name for p in written) == sorted(f"efficient_{t}.csv" for t in TRACE_TYPES)
    for trace_type in TRACE_TYPES:
        frame = load_trace_csv(tmp_path / "out" / f"efficient_{trace_type}.csv")
        expected = trace_frame(portland_bundle, trace_type)
        assert list(frame.columns) == list(expected.columns)
        assert_allclose(frame.to_numpy(dtype=float), expected.to_numpy(dtype=float), rtol=0, atol=0, equal_nan=True)


def test_csv_export_leaves_no_temporary_files(tmp_path, portland_bundle):
    export_traces(portland_bundle, "csv", tmp_path)
    assert not [p for p in tmp_path.iterdir() if p.name.startswith(".")]


def test_json_export(tmp_path, portland_bundle):
    (path,) = export_traces(portland_bundle, "json", tmp_path)
    assert path.name == "efficient_traces.json"

    document = json.loads(path.read_text())

    assert document["kind"] == "efficient"
    assert document["mode"] == "ml"
    assert document["xNames"] == ["p3ca", "p3cs", "p4caf", "p2cs"]
    assert document["mStar"] == pytest.approx(1.848, abs=0.005)
    assert document["lr"][0] == "inf"
    assert document["infd"][0] is None
    assert len(document["lattice"]) == portland_bundle.path.size
    assert document["lattice"][document["knotIndex"]] == pytest.approx(document["mStar"])


def test_export_rejects_unknown_format(tmp_path, portland_bundle):
    with pytest.raises(ExportError, match="unsupported format"):
        export_traces(portland_bundle, "xlsx", tmp_path)


def test_export_into_a_file_fails(tmp_path, portland_bundle):
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory")
    with pytest.raises(ExportError):
        export_traces(portland_bundle, "csv", blocker)


def test_load_trace_csv_missing(tmp_path):
    with pytest.raises(DataError, match="not found"):
        load_trace_csv(tmp_path / "efficient_coef.csv")


def test_load_trace_csv_rejects_foreign_file(tmp_path):
    path = tmp_path / "table.csv"
    path.write_text("heat,p3ca\n1,2\n")
    with pytest.raises(DataError, match="not a trace file"):
        load_trace_csv(path)


def test_favorability(portland_bundle):
    report = favorability(portland_bundle)
    assert report.favorable
    assert report.m_risk_min > 1.0
    assert report.m_inferior_onset is not None
    assert report.m_inferior_onset > 1.0


def test_exact_fit_bundle(exact_cf):
    bundle = assemble_traces(exact_cf, build_efficient_path(exact_cf, 4), RiskMode.ML)

    assert bundle.exact_fit
    assert np.all(np.isnan(bundle.rmse))
    assert np.all(np.isnan(bundle.exev))
    assert all(d is None for d in bundle.infd)
    assert np.all(np.isinf(bundle.lr))
    with pytest.raises(EstimationError, match="exact fit"):
        favorability(bundle)


def test_unbiased_bundle_differs_from_ml(portland_cf, portland_path, portland_bundle):
    unbiased = assemble_traces(portland_cf, portland_path, RiskMode.UNBIASED)
    assert unbiased.mode is RiskMode.UNBIASED
    assert_allclose(unbiased.coef, portland_bundle.coef)
    assert_allclose(unbiased.lr, portland_bundle.lr)
    assert not np.allclose(unbiased.rmse[1:], portland_bundle.rmse[1:])
