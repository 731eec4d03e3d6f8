"""Sequence models: geometric sequences, window weight sequences, exponent sequences.

Sequences are indexed from 1 in all formulas and accessors; internally the
logs live in a numpy array.  A ``LambdaSeq`` drives the de la Vallee-Poussin
windows I_n = [ceil(n - lambda_n + 1), n]; a ``PSeq`` carries the strictly
positive exponent sequence used by the Orlicz modular.
"""

from __future__ import annotations

import io
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence, TextIO, Union

import numpy as np

from .geonum import GeoDomainError, GeoNum

__all__ = [
    "GeoSeq",
    "LambdaSeq",
    "PSeq",
    "SequenceFormatError",
    "generate",
    "GENERATOR_FAMILIES",
    "ingest_lambda",
    "ingest_pseq",
    "ingest_sequence",
    "seq_add",
    "seq_scale",
    "window",
    "write_sequence",
]


class SequenceFormatError(ValueError):
    """A sequence file or stream violates the expected format."""


#: slack absorbed by validation comparisons so that float-accumulated
#: lambda values (e.g. cumulative sums) do not trip exact inequalities
_VALIDATION_EPS = 1e-9


def _as_log_array(logs: Iterable[float]) -> np.ndarray:
    if not isinstance(logs, np.ndarray):
        logs = list(logs)
    arr = np.array(logs, dtype=np.float64, copy=True)
    if arr.ndim != 1:
        raise ValueError("sequence data must be one dimensional")
    if arr.size < 1:
        raise ValueError("sequence must have at least one term")
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        raise GeoDomainError(f"non-finite log at index {int(bad[0]) + 1}")
    return arr


@dataclass(frozen=True, eq=False)
class GeoSeq:
    """A finite truncation of a geometric sequence, stored log-domain.

    ``source`` is a provenance tag: either ``"ingested:..."`` or the
    generator family with its parameters.
    """

    logs: np.ndarray
    source: str = "ingested"

    def __post_init__(self) -> None:
        object.__setattr__(self, "logs", _as_log_array(self.logs))

    @classmethod
    def from_logs(cls, logs: Iterable[float], source: str = "ingested") -> "GeoSeq":
        return cls(logs=logs, source=source)

    @classmethod
    def from_values(cls, values: Iterable[float], source: str = "ingested") -> "GeoSeq":
        out = []
        for i, v in enumerate(values, start=1):
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise GeoDomainError(f"value at index {i} must be a finite positive real, got {v!r}")
            out.append(math.log(v))
        return cls(logs=out, source=source)

    @classmethod
    def from_terms(cls, terms: Iterable[GeoNum], source: str = "ingested") -> "GeoSeq":
        return cls(logs=[t.log for t in terms], source=source)

    def __len__(self) -> int:
        return int(self.logs.size)

    def term(self, i: int) -> GeoNum:
        """1-based term accessor."""
        if not 1 <= i <= len(self):
            raise IndexError(f"index {i} outside 1..{len(self)}")
        return GeoNum(float(self.logs[i - 1]))

    def __iter__(self) -> Iterator[GeoNum]:
        return (GeoNum(float(l)) for l in self.logs)

    def head(self, n: int) -> "GeoSeq":
        if not 1 <= n <= len(self):
            raise IndexError(f"head length {n} outside 1..{len(self)}")
        return GeoSeq(logs=self.logs[:n].copy(), source=self.source)


def seq_add(x: GeoSeq, y: GeoSeq) -> GeoSeq:
    """Termwise geometric sum of two equal-length sequences."""
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    return GeoSeq(logs=x.logs + y.logs, source=f"add({x.source},{y.source})")


def seq_scale(alpha: GeoNum, x: GeoSeq) -> GeoSeq:
    """Termwise geometric product with the scalar ``alpha``."""
    return GeoSeq(logs=alpha.log * x.logs, source=f"scale({alpha.log!r},{x.source})")


@dataclass(frozen=True, eq=False)
class LambdaSeq:
    """A window weight sequence: lambda_1 = 1, non-decreasing, steps at most 1.

    ``unbounded`` is a declared property of the full (untruncated) sequence;
    it cannot be inferred from a truncation, so files must declare it.
    """

    values: np.ndarray
    unbounded: bool = True
    source: str = "builtin"

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("lambda sequence must be a non-empty vector")
        if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
            idx = int(np.flatnonzero(~(np.isfinite(arr) & (arr > 0)))[0]) + 1
            raise ValueError(f"lambda value at index {idx} must be a finite positive real")
        if abs(arr[0] - 1.0) > _VALIDATION_EPS:
            raise ValueError(f"lambda_1 must equal 1, got {arr[0]!r} at index 1")
        steps = np.diff(arr)
        dec = np.flatnonzero(steps < -_VALIDATION_EPS)
        if dec.size:
            i = int(dec[0]) + 2
            raise ValueError(f"lambda must be non-decreasing; first violation at index {i}")
        grow = np.flatnonzero(steps > 1.0 + _VALIDATION_EPS)
        if grow.size:
            i = int(grow[0]) + 2
            raise ValueError(f"lambda_(n+1) <= lambda_n + 1 violated first at index {i}")
        object.__setattr__(self, "values", arr)

    @classmethod
    def cesaro(cls, n: int) -> "LambdaSeq":
        """lambda_n = n, the Cesaro choice."""
        return cls(values=np.arange(1, n + 1, dtype=np.float64), unbounded=True, source="n")

    @classmethod
    def constant_one(cls, n: int) -> "LambdaSeq":
        """lambda_n = 1, single-point windows."""
        return cls(values=np.ones(n), unbounded=False, source="const1")

    @classmethod
    def ceiling_half(cls, n: int) -> "LambdaSeq":
        """lambda_n = ceil(n/2); unbounded with liminf lambda_n/n = 1/2."""
        vals = np.ceil(np.arange(1, n + 1, dtype=np.float64) / 2.0)
        return cls(values=vals, unbounded=True, source="ceil(n/2)")

    @classmethod
    def ceiling_sqrt(cls, n: int) -> "LambdaSeq":
        """lambda_n = ceil(sqrt(n)); unbounded but liminf lambda_n/n = 0."""
        vals = np.ceil(np.sqrt(np.arange(1, n + 1, dtype=np.float64)))
        return cls(values=vals, unbounded=True, source="ceil(sqrt(n))")

    def __len__(self) -> int:
        return int(self.values.size)

    def at(self, n: int) -> float:
        """1-based lambda_n."""
        if not 1 <= n <= len(self):
            raise IndexError(f"index {n} outside 1..{len(self)}")
        return float(self.values[n - 1])

    def window_start(self, n: int) -> int:
        """First index of I_n, clipped up to 1 when lambda_n > n."""
        raw = math.ceil(n - self.at(n) + 1.0 - _VALIDATION_EPS)
        return max(1, raw)

    def window_clipped(self, n: int) -> bool:
        """True when lambda_n > n forced the window start up to 1."""
        return math.ceil(n - self.at(n) + 1.0 - _VALIDATION_EPS) < 1

    def window(self, n: int) -> range:
        """The index window I_n = [ceil(n - lambda_n + 1), n], 1-based inclusive."""
        return range(self.window_start(n), n + 1)

    def window_starts(self, n_max: int) -> np.ndarray:
        """Vectorised window starts for n = 1..n_max (1-based values)."""
        if n_max > len(self):
            raise IndexError(f"n_max {n_max} exceeds lambda length {len(self)}")
        ns = np.arange(1, n_max + 1, dtype=np.float64)
        raw = np.ceil(ns - self.values[:n_max] + 1.0 - _VALIDATION_EPS)
        return np.maximum(1, raw.astype(np.int64))

    def any_clipped(self, n_max: int) -> bool:
        ns = np.arange(1, n_max + 1, dtype=np.float64)
        raw = np.ceil(ns - self.values[:n_max] + 1.0 - _VALIDATION_EPS)
        return bool(np.any(raw < 1))


def window(lam: LambdaSeq, n: int) -> range:
    """Module-level alias for ``LambdaSeq.window``."""
    return lam.window(n)


@dataclass(frozen=True, eq=False)
class PSeq:
    """A bounded strictly positive exponent sequence.

    ``constant_one()`` is the distinguished default marker; ``H`` is the
    paranorm exponent max(1, sup p_k).
    """

    values: np.ndarray
    is_constant_one: bool = False
    source: str = "const:1"

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("p sequence must be a non-empty vector")
        if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
            idx = int(np.flatnonzero(~(np.isfinite(arr) & (arr > 0)))[0]) + 1
            raise ValueError(f"p value at index {idx} must be a finite positive real")
        object.__setattr__(self, "values", arr)

    @classmethod
    def constant(cls, value: float, n: int) -> "PSeq":
        return cls(
            values=np.full(n, float(value)),
            is_constant_one=(value == 1.0),
            source=f"const:{value!r}",
        )

    @classmethod
    def constant_one(cls, n: int) -> "PSeq":
        return cls.constant(1.0, n)

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def H(self) -> float:
        """max(1, sup p_k), the paranorm normalising exponent."""
        return max(1.0, float(self.values.max()))

    @property
    def constant_value(self) -> float | None:
        """The common value when the sequence is constant, else None."""
        v0 = float(self.values[0])
        if np.all(self.values == v0):
            return v0
        return None


# ---------------------------------------------------------------------------
# generator families
# ---------------------------------------------------------------------------

GENERATOR_FAMILIES = (
    "log-polynomial",
    "geometric-constant",
    "log-oscillatory",
    "sparse-spike",
    "custom-log-expression",
)

#: restricted namespace for custom log expressions
_EXPR_NAMES = {
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "sqrt": math.sqrt,
    "log": math.log,
    "exp": math.exp,
    "floor": math.floor,
    "ceil": math.ceil,
    "abs": abs,
    "min": min,
    "max": max,
    "pi": math.pi,
    "e": math.e,
}


def _param_tag(family: str, n: int, params: dict) -> str:
    inner = ",".join(f"{k}={params[k]!r}" for k in sorted(params))
    return f"generator:{family}(n={n}{',' if inner else ''}{inner})"


def _spike_positions(kind: Union[str, Sequence[int]], n: int) -> np.ndarray:
    if isinstance(kind, str):
        if kind == "squares":
            top = int(math.isqrt(n))
            return np.arange(1, top + 1, dtype=np.int64) ** 2
        if kind == "cubes":
            top = int(round(n ** (1.0 / 3.0)))
            while (top + 1) ** 3 <= n:
                top += 1
            while top**3 > n:
                top -= 1
            return np.arange(1, top + 1, dtype=np.int64) ** 3
        try:
            kind = [int(tok) for tok in kind.split(",") if tok.strip()]
        except ValueError:
            raise ValueError(f"unknown spike index set {kind!r}") from None
    pos = np.asarray(list(kind), dtype=np.int64)
    if pos.size and (pos.min() < 1 or pos.max() > n):
        raise ValueError("explicit spike indices must lie in 1..n")
    return pos


def generate(family: str, n: int, **params) -> GeoSeq:
    """Generate a sequence truncation from one of the builtin families.

    Families and parameters:

    * ``log-polynomial``: logs k**m; parameter ``m`` (nonnegative int).
    * ``geometric-constant``: constant logs; parameter ``log`` (default 0).
    * ``log-oscillatory``: logs (-1)**k / 2**m, so that the m-th difference
      of the logs is exactly (-1)**k; parameter ``m`` (nonnegative int).
    * ``sparse-spike``: log 0 except on an index set; parameters ``indices``
      ("squares" | "cubes" | explicit list), ``height`` (default 1.0) and
      ``growth`` ("none" | "sqrt"; "sqrt" gives log sqrt(k) at spike k).
    * ``custom-log-expression``: parameter ``expr``, a Python expression in
      ``k`` evaluated with math functions only, giving the log of term k.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    tag = _param_tag(family, n, params)
    k = np.arange(1, n + 1, dtype=np.float64)

    if family == "log-polynomial":
        m = int(params.get("m", 1))
        if m < 0:
            raise ValueError("log-polynomial requires m >= 0")
        return GeoSeq(logs=k**m, source=tag)

    if family == "geometric-constant":
        c = float(params.get("log", 0.0))
        return GeoSeq(logs=np.full(n, c), source=tag)

    if family == "log-oscillatory":
        m = int(params.get("m", 1))
        if m < 0:
            raise ValueError("log-oscillatory requires m >= 0")
        signs = np.where(np.arange(1, n + 1) % 2 == 0, 1.0, -1.0)
        return GeoSeq(logs=signs / (2.0**m), source=tag)

    if family == "sparse-spike":
        indices = params.get("indices", "squares")
        height = float(params.get("height", 1.0))
        growth = str(params.get("growth", "none"))
        logs = np.zeros(n)
        pos = _spike_positions(indices, n)
        if growth == "none":
            logs[pos - 1] = height
        elif growth == "sqrt":
            logs[pos - 1] = np.sqrt(pos.astype(np.float64))
        else:
            raise ValueError(f"unknown spike growth {growth!r}")
        return GeoSeq(logs=logs, source=tag)

    if family == "custom-log-expression":
        expr = params.get("expr")
        if not isinstance(expr, str) or not expr:
            raise ValueError("custom-log-expression requires a non-empty 'expr' parameter")
        code = compile(expr, "<custom-log-expression>", "eval")
        logs = np.empty(n)
        ns = dict(_EXPR_NAMES)
        for i in range(1, n + 1):
            ns["k"] = i
            try:
                logs[i - 1] = float(eval(code, {"__builtins__": {}}, ns))
            except Exception as exc:
                raise ValueError(f"expression failed at k={i}: {exc}") from exc
        return GeoSeq(logs=logs, source=tag)

    raise ValueError(f"unknown generator family {family!r}")


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------

_HEADER_RE = re.compile(r"^#\s*([A-Za-z_-]+)\s*:\s*(.*?)\s*$")


def _read_numeric_lines(stream: TextIO) -> tuple[dict, list[tuple[int, float]]]:
    """Parse header directives and numeric lines from a sequence stream."""
    headers: dict[str, str] = {}
    rows: list[tuple[int, float]] = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            mt = _HEADER_RE.match(line)
            if mt:
                headers.setdefault(mt.group(1).lower(), mt.group(2))
            continue
        try:
            rows.append((lineno, float(line)))
        except ValueError as exc:
            raise SequenceFormatError(f"line {lineno}: not a number: {line!r}") from exc
    return headers, rows


def _open_maybe(path_or_stream: Union[str, Path, TextIO]):
    if isinstance(path_or_stream, (str, Path)):
        return open(path_or_stream, "r", encoding="utf-8"), True, str(path_or_stream)
    name = getattr(path_or_stream, "name", "<stream>")
    return path_or_stream, False, str(name)


def ingest_sequence(path_or_stream: Union[str, Path, TextIO], fmt: str | None = None) -> GeoSeq:
    """Read a sequence file: one numeric per line, ``#format: raw|log`` header.

    ``fmt`` overrides the header; one of the two must determine the format.
    Raw values must be strictly positive.
    """
    stream, close, name = _open_maybe(path_or_stream)
    try:
        headers, rows = _read_numeric_lines(stream)
    finally:
        if close:
            stream.close()
    fmt = fmt or headers.get("format")
    if fmt not in ("raw", "log"):
        raise SequenceFormatError(
            f"{name}: format must be declared via '#format: raw|log' or the fmt argument"
        )
    if not rows:
        raise SequenceFormatError(f"{name}: no numeric lines")
    if fmt == "raw":
        for lineno, v in rows:
            if not (v > 0 and math.isfinite(v)):
                raise SequenceFormatError(f"{name}: line {lineno}: raw value must be positive, got {v!r}")
        logs = [math.log(v) for _, v in rows]
    else:
        for lineno, v in rows:
            if not math.isfinite(v):
                raise SequenceFormatError(f"{name}: line {lineno}: log value must be finite")
        logs = [v for _, v in rows]
    return GeoSeq(logs=logs, source=headers.get("source", f"ingested:{name}"))


def write_sequence(seq: GeoSeq, path_or_stream: Union[str, Path, TextIO], fmt: str = "log") -> None:
    """Write a sequence file; the log format round-trips bit exactly."""
    if fmt not in ("raw", "log"):
        raise ValueError(f"format must be 'raw' or 'log', got {fmt!r}")
    lines = [f"#format: {fmt}", f"#source: {seq.source}"]
    if fmt == "log":
        lines += [repr(float(l)) for l in seq.logs]
    else:
        lines += [repr(GeoNum(float(l)).value) for l in seq.logs]
    text = "\n".join(lines) + "\n"
    if isinstance(path_or_stream, (str, Path)):
        Path(path_or_stream).write_text(text, encoding="utf-8")
    else:
        path_or_stream.write(text)


def ingest_lambda(path_or_stream: Union[str, Path, TextIO]) -> LambdaSeq:
    """Read a window weight sequence file; ``#unbounded: true|false`` declares growth."""
    stream, close, name = _open_maybe(path_or_stream)
    try:
        headers, rows = _read_numeric_lines(stream)
    finally:
        if close:
            stream.close()
    if not rows:
        raise SequenceFormatError(f"{name}: no numeric lines")
    unbounded = headers.get("unbounded", "false").strip().lower()
    if unbounded not in ("true", "false"):
        raise SequenceFormatError(f"{name}: '#unbounded:' must be true or false")
    try:
        return LambdaSeq(
            values=np.array([v for _, v in rows]),
            unbounded=(unbounded == "true"),
            source=f"ingested:{name}",
        )
    except ValueError as exc:
        raise SequenceFormatError(f"{name}: {exc}") from exc


def ingest_pseq(path_or_stream: Union[str, Path, TextIO]) -> PSeq:
    """Read an exponent sequence file: one positive real per line."""
    stream, close, name = _open_maybe(path_or_stream)
    try:
        _, rows = _read_numeric_lines(stream)
    finally:
        if close:
            stream.close()
    if not rows:
        raise SequenceFormatError(f"{name}: no numeric lines")
    try:
        return PSeq(values=np.array([v for _, v in rows]), source=f"ingested:{name}")
    except ValueError as exc:
        raise SequenceFormatError(f"{name}: {exc}") from exc


def parse_sequence_text(text: str, fmt: str | None = None) -> GeoSeq:
    """Convenience wrapper used by the service layer."""
    return ingest_sequence(io.StringIO(text), fmt=fmt)
