"""Bit-exact readers and writers for group files and result documents.

Group files are delimited text: header `subject,re_<f1>,im_<f1>,...` with
frequencies printed to 3 decimals, one row per subject, comma separator,
UTF-8, LF line endings.  Complex values travel as separate re/im columns so
no locale-dependent complex syntax is involved.

Result documents are canonical JSON: keys sorted, floats printed with 17
significant digits (lossless for binary64), LF-terminated.  Writing the
same result twice yields identical bytes, so documents are diffable and
hashable.  Formats are documented in docs/formats.md and pinned by golden
files under tests/golden/.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from ._version import __version__
from .bootstrap import (BandResult, BootstrapParams, residual,
                        residual_spectrum, zero_line)
from .errors import GroupFormatError, ResultFormatError, ValidationError
from .grids import FrequencyGrid, TimeGrid, make_frequency_grid
from .transform import Frf, FrfGroup

RESULT_FORMAT = "frfband-result"
RESULT_FORMAT_VERSION = 1

_SUBJECT_COLUMN = "subject"


def _format_float(x):
    return f"{x:.17g}"


def _freq_token(f):
    return f"{f:.3f}"


# ---------------------------------------------------------------- group files

def read_frf_group(source) -> FrfGroup:
    """Parse a group file into an FrfGroup.

    source may be a path or a binary file-like object.  Errors carry
    1-based row/column positions (the header is row 1).
    """
    data = _read_bytes(source)
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise GroupFormatError(f"not valid UTF-8: {exc}") from None
    lines = text.split("\n")
    # a trailing newline leaves one empty tail entry; interior blanks are errors
    while lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise GroupFormatError("empty file")

    freqs = _parse_header(lines[0])
    try:
        grid = make_frequency_grid(freqs)
    except ValidationError as exc:
        raise GroupFormatError(f"header frequencies invalid: {exc}", row=1) from None
    m = len(freqs)
    expected = 1 + 2 * m

    members = []
    labels = []
    for rownum, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != expected:
            raise GroupFormatError(
                f"expected {expected} fields, found {len(fields)}", row=rownum
            )
        labels.append(fields[0])
        values = np.empty(m, dtype=np.complex128)
        for k in range(m):
            re = _parse_number(fields[1 + 2 * k], rownum, 2 + 2 * k)
            im = _parse_number(fields[2 + 2 * k], rownum, 3 + 2 * k)
            values[k] = complex(re, im)
        members.append(Frf(values))
    if not members:
        raise GroupFormatError("no data rows (empty group)")
    return FrfGroup(grid=grid, members=tuple(members), labels=tuple(labels))


def write_frf_group(group: FrfGroup, dest) -> None:
    """Write a group file (see module docstring for the layout)."""
    header = [_SUBJECT_COLUMN]
    for f in group.grid.freqs:
        token = _freq_token(f)
        header.append(f"re_{token}")
        header.append(f"im_{token}")
    lines = [",".join(header)]
    labels = group.labels or tuple(
        f"s{i + 1:02d}" for i in range(len(group.members))
    )
    for label, frf in zip(labels, group.members):
        if "," in label or "\n" in label:
            raise ValidationError(f"subject label {label!r} contains a delimiter")
        row = [label]
        for v in frf.values:
            row.append(_format_float(v.real))
            row.append(_format_float(v.imag))
        lines.append(",".join(row))
    payload = ("\n".join(lines) + "\n").encode("utf-8")
    _write_bytes(dest, payload)


def _parse_header(line):
    fields = line.split(",")
    if not fields or fields[0] != _SUBJECT_COLUMN:
        raise GroupFormatError(
            f"header must start with {_SUBJECT_COLUMN!r}", row=1, column=1
        )
    if len(fields) < 3 or (len(fields) - 1) % 2 != 0:
        raise GroupFormatError(
            "header needs re_<f>,im_<f> column pairs", row=1
        )
    freqs = []
    for k in range((len(fields) - 1) // 2):
        re_name = fields[1 + 2 * k]
        im_name = fields[2 + 2 * k]
        if not re_name.startswith("re_") or not im_name.startswith("im_"):
            raise GroupFormatError(
                f"expected re_/im_ pair, found {re_name!r},{im_name!r}",
                row=1, column=2 + 2 * k,
            )
        if re_name[3:] != im_name[3:]:
            raise GroupFormatError(
                f"column pair frequencies differ: {re_name!r} vs {im_name!r}",
                row=1, column=2 + 2 * k,
            )
        try:
            f = float(re_name[3:])
        except ValueError:
            raise GroupFormatError(
                f"cannot parse frequency from {re_name!r}", row=1, column=2 + 2 * k
            ) from None
        if not math.isfinite(f):
            raise GroupFormatError(
                f"non-finite header frequency {re_name!r}", row=1, column=2 + 2 * k
            )
        freqs.append(f)
    if any(b <= a for a, b in zip(freqs, freqs[1:])):
        raise GroupFormatError(
            "header frequencies must be strictly increasing", row=1
        )
    return freqs


def _parse_number(token, row, column):
    try:
        value = float(token)
    except ValueError:
        raise GroupFormatError(
            f"cannot parse number {token!r}", row=row, column=column
        ) from None
    if not math.isfinite(value):
        raise GroupFormatError(
            f"non-finite value {token!r}", row=row, column=column
        )
    return value


def _read_bytes(source):
    if hasattr(source, "read"):
        return source.read()
    with open(source, "rb") as fh:
        return fh.read()


def _write_bytes(dest, payload):
    if hasattr(dest, "write"):
        dest.write(payload)
        return
    with open(dest, "wb") as fh:
        fh.write(payload)


def sha256_digest(source) -> str:
    """Hex SHA-256 of a file's raw bytes."""
    return hashlib.sha256(_read_bytes(source)).hexdigest()


# ------------------------------------------------------------ result documents

def _canonical(obj, out):
    """Canonical JSON: sorted keys, 17-significant-digit floats, no spaces."""
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise ValidationError(f"cannot serialize non-finite number {x!r}")
        out.append(_format_float(x))
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if i:
                out.append(",")
            if not isinstance(key, str):
                raise ValidationError(f"non-string key {key!r}")
            out.append(json.dumps(key, ensure_ascii=False))
            out.append(":")
            _canonical(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            _canonical(item, out)
        out.append("]")
    else:
        raise ValidationError(f"cannot serialize {type(obj).__name__}")


def canonical_json(tree) -> bytes:
    """Serialize a tree to canonical JSON bytes (LF-terminated)."""
    out = []
    _canonical(tree, out)
    return ("".join(out) + "\n").encode("utf-8")


def _stats_summary(stats):
    q = np.quantile(stats, [0.25, 0.5, 0.75, 0.95, 0.99])
    return {
        "min": float(stats[0]),
        "p25": float(q[0]),
        "median": float(q[1]),
        "p75": float(q[2]),
        "p95": float(q[3]),
        "p99": float(q[4]),
        "max": float(stats[-1]),
        "count": int(stats.size),
    }


def build_result_tree(result: BandResult, grid: FrequencyGrid, tg: TimeGrid,
                      params: BootstrapParams, oversample, inclusive_endpoint,
                      digests) -> dict:
    """Assemble the serializable tree for a band result.

    The residual spectrum is that of the zero line (the null hypothesis)
    against the band.  The thread count is deliberately not recorded: it
    never changes the numbers.
    """
    res = residual(zero_line(tg), result)
    spec_values, spec_mag = residual_spectrum(res, tg, grid)
    return {
        "format": RESULT_FORMAT,
        "format_version": RESULT_FORMAT_VERSION,
        "software_version": __version__,
        "parameters": {
            "alpha": params.alpha,
            "B": params.B,
            "Bs": params.Bs,
            "seed": params.seed,
            "sigma_floor": params.sigma_floor,
            "quantile_method": params.quantile_method,
            "oversample": float(oversample),
            "inclusive_endpoint": bool(inclusive_endpoint),
            "freqs": list(grid.freqs),
            "base_freq": grid.base_freq,
            "period": grid.period,
            "sample_rate": tg.sample_rate,
            "n_samples": tg.n_samples,
        },
        "digests": dict(digests),
        "cc": result.cc,
        "reject": result.reject,
        "degenerate": result.degenerate,
        "crossings": [
            {"t_start": c.t_start, "t_end": c.t_end, "n_samples": c.n_samples}
            for c in result.crossings
        ],
        "avg": result.avg.samples,
        "sigma": result.sigma,
        "band_upper": result.band_upper,
        "band_lower": result.band_lower,
        "residual_spectrum": {
            "freqs": list(grid.freqs),
            "re": spec_values.real,
            "im": spec_values.imag,
            "magnitude": spec_mag,
        },
        "stats_summary": _stats_summary(result.stats),
    }


def write_result(result: BandResult, meta) -> bytes:
    """Serialize a band result to canonical JSON bytes.

    meta must supply grid, tg, params, oversample, inclusive_endpoint and
    digests (a mapping of input names to SHA-256 hexes), as produced by the
    command-line front end.
    """
    tree = build_result_tree(
        result,
        grid=meta["grid"],
        tg=meta["tg"],
        params=meta["params"],
        oversample=meta["oversample"],
        inclusive_endpoint=meta["inclusive_endpoint"],
        digests=meta["digests"],
    )
    return canonical_json(tree)


@dataclass(frozen=True)
class ResultDocument:
    """Parsed, validated result document."""

    tree: dict

    @property
    def parameters(self):
        return self.tree["parameters"]

    @property
    def cc(self):
        return self.tree["cc"]

    @property
    def reject(self):
        return self.tree["reject"]

    @property
    def crossings(self):
        return self.tree["crossings"]

    @property
    def digests(self):
        return self.tree["digests"]

    def array(self, name):
        return np.asarray(self.tree[name], dtype=np.float64)


_REQUIRED_KEYS = (
    "format", "format_version", "software_version", "parameters", "digests",
    "cc", "reject", "degenerate", "crossings", "avg", "sigma", "band_upper",
    "band_lower", "residual_spectrum", "stats_summary",
)


def read_result(source) -> ResultDocument:
    """Parse and validate a result document.

    Raises
    ------
    ResultFormatError
        Unparseable JSON, wrong format tag, unsupported version, missing
        keys, mismatched array lengths, or out-of-range crossings.
    """
    data = _read_bytes(source)
    try:
        tree = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ResultFormatError(f"not a valid result document: {exc}") from None
    if not isinstance(tree, dict):
        raise ResultFormatError("top level must be an object")
    for key in _REQUIRED_KEYS:
        if key not in tree:
            raise ResultFormatError(f"missing key {key!r} (truncated document?)")
    if tree["format"] != RESULT_FORMAT:
        raise ResultFormatError(f"unknown format {tree['format']!r}")
    if tree["format_version"] != RESULT_FORMAT_VERSION:
        raise ResultFormatError(
            f"unsupported format version {tree['format_version']!r} "
            f"(supported: {RESULT_FORMAT_VERSION})"
        )
    n = tree["parameters"].get("n_samples")
    for name in ("avg", "sigma", "band_upper", "band_lower"):
        if len(tree[name]) != n:
            raise ResultFormatError(
                f"array {name!r} has {len(tree[name])} entries, expected {n}"
            )
    period = tree["parameters"].get("period")
    for c in tree["crossings"]:
        if not (0.0 <= c["t_start"] <= c["t_end"] < period + 1e-9):
            raise ResultFormatError(
                f"crossing [{c['t_start']}, {c['t_end']}] outside [0, {period})"
            )
    return ResultDocument(tree)
