"""Parameter JSON, data CSV and report files."""

from __future__ import annotations

import csv
import io as _io
import json
import logging
import os
import sys
import tempfile
from importlib import resources

import numpy as np

from .errors import DataValidationError, ParameterDomainError
from .params import CanonicalParams, FrameDecomposition, FullParams, from_mean_covariance

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
UNIT_TOL = 1e-6
RENORMALIZE_TOL = 1e-3


def _read_text(path):
    if str(path) == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def parse_params(doc) -> FrameDecomposition:
    """Accept ``{"theta", "gamma"}`` or ``{"mu", "sigma"}``; always return a frame decomposition."""
    if not isinstance(doc, dict):
        raise ParameterDomainError("parameter document must be a JSON object")
    if "theta" in doc:
        theta = doc["theta"]
        gamma = doc.get("gamma", [0.0] * len(theta))
        params = CanonicalParams(theta, gamma)
        return FrameDecomposition(params, np.eye(params.p), 0.0)
    if "mu" in doc and "sigma" in doc:
        return from_mean_covariance(FullParams(doc["mu"], doc["sigma"]))
    raise ParameterDomainError('parameters need "theta" (and "gamma") or "mu" and "sigma"')


def load_params(path) -> FrameDecomposition:
    try:
        doc = json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise ParameterDomainError(f"malformed parameter JSON in {path}: {exc}") from exc
    return parse_params(doc)


def read_data_csv(path) -> np.ndarray:
    """Numeric CSV, one observation per row; an optional non-numeric header is skipped."""
    rows = []
    reader = csv.reader(_io.StringIO(_read_text(path)))
    for lineno, record in enumerate(reader, start=1):
        if not record or all(not cell.strip() for cell in record):
            continue
        try:
            rows.append([float(cell) for cell in record])
        except ValueError:
            if lineno == 1 and not rows:
                continue
            raise DataValidationError(f"non-numeric value on line {lineno}", [lineno - 1])
    if not rows:
        raise DataValidationError(f"no data rows in {path}")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise DataValidationError(f"rows have differing column counts {sorted(widths)}")
    return np.array(rows, dtype=float)


def project_to_sphere(X, unit_tol=UNIT_TOL, renormalize_tol=RENORMALIZE_TOL):
    """Rescale rows to unit length.

    Rows off the sphere by more than ``unit_tol`` trigger a warning; by more
    than ``renormalize_tol`` they are rejected.
    """
    X = np.asarray(X, dtype=float)
    norms = np.linalg.norm(X, axis=1)
    dev = np.abs(norms - 1.0)
    bad = np.flatnonzero(~(dev <= renormalize_tol))
    if bad.size:
        shown = ", ".join(str(i) for i in bad[:20])
        raise DataValidationError(
            f"{bad.size} rows are not on the unit sphere within {renormalize_tol:g} (rows {shown})",
            bad,
        )
    loose = np.flatnonzero(dev > unit_tol)
    if loose.size:
        log.warning("re-normalized %d rows that were off the sphere by up to %.3g", loose.size, dev.max())
    return X / norms[:, None]


def format_csv(X) -> str:
    buf = _io.StringIO()
    for row in np.asarray(X, dtype=float):
        buf.write(",".join(repr(float(v)) for v in row))
        buf.write("\n")
    return buf.getvalue()


def write_atomic(path, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".fbnorm-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def report_schema():
    text = resources.files("fbnorm").joinpath("report.schema.json").read_text(encoding="utf-8")
    return json.loads(text)
