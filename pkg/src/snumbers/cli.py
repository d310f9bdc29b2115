"""Command-line front end.

Commands::

    snumbers classify --params s1=2,s2=0,p1=2,p2=2,alpha=1
    snumbers widths   --params N=8,p_src=1,p_dst=2,kind=gelfand
    snumbers blocks   --params delta=2,alpha=1,p1=2,p2=2,J=3,I=3,M=2
    snumbers verify   --params delta=2,alpha=1,p1=2,p2=2,kind=kolmogorov --tol 0.1
    snumbers sweep    --params delta=0.4,alpha=1 --range p1=1,2,inf --range p2=1,2,inf --out rows.jsonl

The token ``inf`` stands for infinity in parameters and in JSON output.
Exit status is 0 when every requested item succeeded, 1 when some item
failed, 2 on usage errors and 3 when the output cannot be written.
"""
from __future__ import annotations

import argparse
import concurrent.futures
import csv
import io
import itertools
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Optional

from . import __version__
from ._validation import INF, parse_exponent
from .discretization import (
    DEFAULT_GRID,
    RateFit,
    WeightedSequenceModel,
    build_blocks,
    split_PQ,
    verify_exponent,
)
from .exceptions import NotApplicableError, NotCompactError, SNumbersError, TruncationError, ValidationError
from .finite import KINDS, FiniteEmbedding, WidthResult, width
from .params import FAMILIES, Classification, EmbeddingParams, NotCovered, classify

__all__ = ["main", "Report", "RunConfig", "CSV_SCHEMA", "CONSTANTS_NOTICE"]

COMMANDS = ("classify", "widths", "blocks", "verify", "sweep")
CSV_SCHEMA = "# snumbers-csv v1"
CSV_COLUMNS = ("n", "bound", "method", "constants_undetermined")
SWEEP_CSV_SCHEMA = "# snumbers-sweep-csv v1"
WORKERS_ENV = "SNUMBERS_WORKERS"
CONSTANTS_NOTICE = (
    "Envelope values evaluate unknown absolute constants as 1; "
    "they describe shapes in n and N, not numerical values."
)

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

_EMBEDDING_KEYS = ("s1", "s2", "p1", "p2", "q1", "q2", "alpha", "d", "source_type", "target_type", "delta")
_EXPONENT_KEYS = ("p1", "p2", "q1", "q2", "p_src", "p_dst")
_OPTION_KEYS = {
    "classify": (),
    "sweep": (),
    "blocks": ("J", "I", "M"),
    "verify": ("kind", "combine", "max_J", "max_I", "initial_level", "allow_envelope", "inv_s", "inv_beta"),
    "widths": ("N", "p_src", "p_dst", "scale", "kind", "n_max", "method", "starts", "budget"),
}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def _json_safe(value):
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return "nan"
        return value
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def dumps(obj):
    return json.dumps(_json_safe(obj), allow_nan=False)


def parse_assignments(text, what="--params"):
    """``"a=1,b=inf"`` -> ``{"a": "1", "b": "inf"}`` with the offending token on error."""
    out = {}
    for token in (t.strip() for t in text.split(",")):
        if not token:
            continue
        key, sep, value = token.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise UsageError(f"{what}: malformed token {token!r} (expected key=value)")
        out[key] = value
    return out


def parse_range(text):
    key, sep, values = text.partition("=")
    key = key.strip()
    items = [v.strip() for v in values.split(",") if v.strip()]
    if not sep or not key:
        raise UsageError(f"--range: malformed token {text!r} (expected key=v1,v2,...)")
    if not items:
        raise UsageError(f"--range: empty range for {key!r}")
    return key, items


def parse_grid(text):
    """``"16:4096:2"`` (geometric start:stop:ratio) or an explicit ``"16,64,256"``."""
    try:
        if ":" in text:
            start, stop, ratio = (int(x) for x in text.split(":"))
            if start < 1 or ratio < 2 or stop < start:
                raise ValueError
            grid, n = [], start
            while n <= stop:
                grid.append(n)
                n *= ratio
            return tuple(grid)
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise UsageError(f"--grid: cannot parse {text!r}") from None


def _number(key, value):
    if key in _EXPONENT_KEYS:
        return parse_exponent(value, key)
    try:
        return float(value)
    except ValueError:
        raise UsageError(f"--params: value {value!r} for {key!r} is not a number") from None


def _integer(key, value):
    try:
        return int(value)
    except ValueError:
        raise UsageError(f"--params: value {value!r} for {key!r} is not an integer") from None


def embedding_from(values):
    """Build :class:`EmbeddingParams`; ``delta`` may replace ``s1`` (``s2`` defaults to 0)."""
    kw = {}
    for key, value in values.items():
        if key in ("source_type", "target_type"):
            kw[key] = value.upper()
        elif key == "d":
            kw[key] = _integer(key, value)
        else:
            kw[key] = _number(key, value)
    missing = [k for k in ("p1", "p2", "alpha") if k not in kw]
    if "delta" not in kw and "s1" not in kw:
        missing.append("s1 (or delta)")
    if missing:
        raise UsageError(f"--params: missing {', '.join(missing)}")
    kw.setdefault("q1", 2.0)
    kw.setdefault("q2", 2.0)
    kw.setdefault("s2", 0.0)
    kw.setdefault("d", 1)
    if "delta" in kw:
        if "s1" in kw:
            raise UsageError("--params: give either s1 or delta, not both")
        return EmbeddingParams.from_gap(kw.pop("delta"), kw.pop("alpha"), kw.pop("p1"), kw.pop("p2"), **kw)
    return EmbeddingParams(**kw)


def _split_params(command, values):
    options = {k: v for k, v in values.items() if k in _OPTION_KEYS[command]}
    embedding = {k: v for k, v in values.items() if k not in options}
    allowed = _EMBEDDING_KEYS if command != "widths" else ()
    unknown = [k for k in embedding if k not in allowed]
    if unknown:
        raise UsageError(f"--params: unknown key {unknown[0]!r} for {command}")
    return embedding, options


# ---------------------------------------------------------------------------
# config and report
# ---------------------------------------------------------------------------

@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    ranges: list = field(default_factory=list)
    grid: tuple = DEFAULT_GRID
    tol: float = 0.1
    seed: int = 0
    out: Optional[str] = None
    format: str = "json"
    timing: bool = False

    def to_dict(self):
        return {
            "command": self.command,
            "params": dict(self.params),
            "ranges": [[k, list(v)] for k, v in self.ranges],
            "grid": list(self.grid),
            "tol": self.tol,
            "seed": self.seed,
            "out": self.out,
            "format": self.format,
        }

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        data["ranges"] = [(k, list(v)) for k, v in data.get("ranges", [])]
        data["grid"] = tuple(data.get("grid", DEFAULT_GRID))
        return cls(**data)


def _item_to_dict(item):
    if isinstance(item, dict):
        return item
    return item.to_dict()


def _item_from_dict(command, data):
    if "error" in data or data.get("valid") is False:
        return data
    if command in ("classify", "sweep"):
        return Classification.from_dict(data)
    if command == "widths":
        return WidthResult.from_dict(data)
    if command == "verify":
        return RateFit.from_dict(data)
    return data


@dataclass
class Report:
    config: RunConfig
    items: list
    ok: bool
    version: str = __version__
    notice: str = CONSTANTS_NOTICE
    timing: Optional[float] = None

    def to_dict(self):
        out = {
            "tool": "snumbers",
            "version": self.version,
            "config": self.config.to_dict(),
            "ok": self.ok,
            "notice": self.notice,
            "items": [_item_to_dict(i) for i in self.items],
        }
        if self.timing is not None:
            out["timing_seconds"] = self.timing
        return out

    @classmethod
    def from_dict(cls, data):
        config = RunConfig.from_dict(data["config"])
        return cls(
            config=config,
            items=[_item_from_dict(config.command, i) for i in data["items"]],
            ok=bool(data["ok"]),
            version=data["version"],
            notice=data["notice"],
            timing=data.get("timing_seconds"),
        )


def _error_item(kind, exc, **extra):
    return {"error": kind, "message": str(exc), **extra}


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _grid_points(config):
    """Cartesian product of the ranges over the base parameters, in flag order."""
    base = dict(config.params)
    if not config.ranges:
        return [base]
    keys = [k for k, _ in config.ranges]
    return [{**base, **dict(zip(keys, combo))} for combo in itertools.product(*(v for _, v in config.ranges))]


def _classify_point(values):
    """Classification for one grid point; invalid tuples become rows marked ``valid: false``."""
    try:
        params = embedding_from(values)
    except ValidationError as exc:
        reason = "outside-parameter-range"
        return {"valid": False, "params": dict(values), "reason": reason, "message": str(exc),
                "families": {k: NotCovered(reason).to_dict() for k in FAMILIES}}
    return classify(params)


def _workers():
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None


def _ordered_map(fn, items):
    workers = _workers()
    if workers == 1:
        yield from map(fn, items)
        return
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(fn, items)


def _validate_points(config):
    points = _grid_points(config)
    for point in points:
        _split_params("classify", point)
    return points


def run_classify(config: RunConfig) -> Report:
    points = _validate_points(config)
    if not config.ranges:
        # a single tuple must be valid; ranges may legitimately hit invalid corners
        embedding_from(points[0])
    items = list(_ordered_map(_classify_point, points))
    return Report(config, items, ok=True)


def _sweep_row(index, item):
    if isinstance(item, dict):
        return {"index": index, **item}
    return {"index": index, "valid": True, **item.to_dict()}


def _family_cell(result):
    if isinstance(result, NotCovered):
        return f"not-covered:{result.reason}"
    return f"{result.kappa!r}@{result.case}"


def _sweep_csv_row(index, item):
    if isinstance(item, dict):
        p = item["params"]
        cells = ["not-covered:" + item["reason"]] * 3
        values = [p.get(k, "") for k in ("s1", "s2", "p1", "p2", "q1", "q2", "alpha", "d")]
    else:
        p = item.params.to_dict()
        cells = [_family_cell(item.family(k)) for k in FAMILIES]
        values = [p[k] for k in ("s1", "s2", "p1", "p2", "q1", "q2", "alpha", "d")]
    return [index, *values, *cells]


def run_sweep(config: RunConfig, stream) -> Report:
    """Classify every grid point, writing one row per point as soon as it is ready."""
    points = _validate_points(config)
    writer = None
    if config.format == "csv":
        stream.write(SWEEP_CSV_SCHEMA + "\n")
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["index", "s1", "s2", "p1", "p2", "q1", "q2", "alpha", "d", *FAMILIES])
    items = []
    for index, item in enumerate(_ordered_map(_classify_point, points)):
        if writer is None:
            stream.write(dumps(_sweep_row(index, item)) + "\n")
        else:
            writer.writerow(_sweep_csv_row(index, item))
        stream.flush()
        items.append(item)
    return Report(config, items, ok=True)


def run_widths(config: RunConfig) -> Report:
    _, options = _split_params("widths", config.params)
    missing = [k for k in ("N", "p_src", "p_dst") if k not in options]
    if missing:
        raise UsageError(f"--params: missing {', '.join(missing)}")
    emb = FiniteEmbedding(
        _integer("N", options["N"]),
        parse_exponent(options["p_src"], "p_src"),
        parse_exponent(options["p_dst"], "p_dst"),
        _number("scale", options.get("scale", "1")),
    )
    kind = options.get("kind", "approximation")
    if kind not in KINDS:
        raise UsageError(f"--params: kind must be one of {KINDS}, got {kind!r}")
    n_max = _integer("n_max", options.get("n_max", str(emb.N + 1)))
    method = options.get("method", "auto")
    if method not in ("auto", "oracle"):
        raise UsageError(f"--params: method must be 'auto' or 'oracle', got {method!r}")
    items, ok = [], True
    for n in range(1, n_max + 1):
        try:
            if method == "oracle":
                from .oracle import subspace_search_oracle

                items.append(subspace_search_oracle(
                    emb, n, kind, budget=_integer("budget", options.get("budget", "400")),
                    starts=_integer("starts", options.get("starts", "64")), seed=config.seed))
            else:
                items.append(width(emb, n, kind))
        except NotApplicableError as exc:
            items.append(_error_item("not-applicable", exc, n=n))
            ok = False
    return Report(config, items, ok=ok)


def run_blocks(config: RunConfig) -> Report:
    embedding, options = _split_params("blocks", config.params)
    params = embedding_from(embedding)
    J = _integer("J", options.get("J", "3"))
    I = _integer("I", options.get("I", "3"))
    try:
        blocks = build_blocks(WeightedSequenceModel(params, J, I))
    except NotCompactError as exc:
        return Report(config, [_error_item("not-compact", exc)], ok=False)
    part = {}
    if "M" in options:
        P, _ = split_PQ(blocks, _integer("M", options["M"]))
        part = {(b.j, b.i): "P" for b in P}
    items = []
    for b in blocks:
        row = {"j": b.j, "i": b.i, "dim": b.dim, "sigma": b.sigma}
        if part or "M" in options:
            row["part"] = part.get((b.j, b.i), "Q")
        items.append(row)
    return Report(config, items, ok=True)


_BOOL = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}


def run_verify(config: RunConfig) -> Report:
    embedding, options = _split_params("verify", config.params)
    params = embedding_from(embedding)
    kw = {}
    for key in ("max_J", "max_I", "initial_level"):
        if key in options:
            kw[key] = _integer(key, options[key])
    for key in ("inv_s", "inv_beta"):
        if key in options:
            kw[key] = _number(key, options[key])
    if "allow_envelope" in options:
        flag = options["allow_envelope"].lower()
        if flag not in _BOOL:
            raise UsageError(f"--params: allow_envelope must be true or false, got {flag!r}")
        kw["allow_envelope"] = _BOOL[flag]
    if "combine" in options:
        kw["combine"] = options["combine"]
    kind = options.get("kind", "kolmogorov")
    try:
        fit = verify_exponent(params, kind, config.grid, config.tol, **kw)
    except NotApplicableError as exc:
        return Report(config, [_error_item("not-applicable", exc)], ok=False)
    except TruncationError as exc:
        return Report(config, [_error_item("truncation", exc, limit=exc.limit)], ok=False)
    return Report(config, [fit], ok=fit.passed)


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _csv_rows(report):
    """Rows of the versioned ``n, bound, method, constants_undetermined`` table."""
    rows = []
    for item in report.items:
        if isinstance(item, WidthResult):
            rows.append((item.n, item.bound, item.method, item.constants_undetermined))
        elif isinstance(item, RateFit):
            method = "assembled-" + item.width_source
            rows.extend((n, b, method, item.constants_undetermined) for n, b in item.samples)
    return rows


def render_csv(report):
    buf = io.StringIO()
    if report.config.command == "blocks":
        buf.write("# snumbers-blocks-csv v1\n")
        keys = list(report.items[0]) if report.items else ["j", "i", "dim", "sigma"]
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(keys)
        for row in report.items:
            writer.writerow([row.get(k, "") for k in keys])
        return buf.getvalue()
    if report.config.command == "classify":
        raise UsageError("classify has no CSV form; use sweep --format csv")
    buf.write(CSV_SCHEMA + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for n, bound, method, flag in _csv_rows(report):
        writer.writerow([n, repr(float(bound)), method, "true" if flag else "false"])
    return buf.getvalue()


def render_json(report):
    return json.dumps(_json_safe(report.to_dict()), indent=2, allow_nan=False) + "\n"


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _read_config_file(path):
    """Plain ``key=value`` lines; ``range`` may repeat; ``#`` starts a comment."""
    values, ranges = {}, []
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"--config: cannot read {path!r}: {exc.strerror}") from None
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise UsageError(f"--config: line {lineno} is not key=value: {line!r}")
        if key == "range":
            ranges.append(value)
        else:
            values[key] = value
    return values, ranges


def build_parser():
    parser = argparse.ArgumentParser(
        prog="snumbers",
        description="Asymptotic exponents and finite-dimensional widths of weighted embeddings.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--params", help="comma-separated key=value pairs; 'inf' means infinity")
        p.add_argument("--range", action="append", default=None, metavar="KEY=V1,V2,...",
                       help="range for one parameter (repeatable); the grid is their product")
        p.add_argument("--grid", help="n-grid: start:stop:ratio or an explicit comma list")
        p.add_argument("--tol", type=float, help="tolerance for the slope verdict (default 0.1)")
        p.add_argument("--seed", type=int, help="root seed for randomized oracles (default 0)")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", choices=("json", "csv"), help="output format (default json)")
        p.add_argument("--config", help="key=value file; command-line flags override it")
        p.add_argument("--timing", action="store_true", help="include wall-clock time in the report")
    return parser


def config_from_args(args) -> RunConfig:
    file_values, file_ranges = ({}, [])
    if args.config:
        file_values, file_ranges = _read_config_file(args.config)
    known = {"params", "grid", "tol", "seed", "out", "format"}
    stray = sorted(set(file_values) - known)
    if stray:
        raise UsageError(f"--config: unknown key {stray[0]!r}")

    def pick(name):
        flag = getattr(args, name)
        return flag if flag is not None else file_values.get(name)

    params = parse_assignments(pick("params") or "")
    ranges = [parse_range(r) for r in (args.range if args.range is not None else file_ranges)]
    grid = parse_grid(pick("grid")) if pick("grid") else DEFAULT_GRID
    tol = float(pick("tol")) if pick("tol") is not None else 0.1
    if not tol > 0 or math.isinf(tol):
        raise UsageError(f"--tol must be a positive number, got {tol}")
    seed = int(pick("seed")) if pick("seed") is not None else 0
    fmt = pick("format") or "json"
    if fmt not in ("json", "csv"):
        raise UsageError(f"--format must be json or csv, got {fmt!r}")
    if args.command not in ("classify", "sweep") and ranges:
        raise UsageError(f"--range is only accepted by classify and sweep")
    return RunConfig(args.command, params, ranges, grid, tol, seed, pick("out"), fmt, args.timing)


def _open_output(path):
    if path is None or path == "-":
        return sys.stdout, False
    try:
        return open(path, "w", encoding="utf-8", newline=""), True
    except OSError as exc:
        raise OSError(f"cannot write {path!r}: {exc.strerror}") from None


def _sidecar_csv(path, report):
    root, _ = os.path.splitext(path)
    with open(root + ".csv", "w", encoding="utf-8", newline="") as fh:
        fh.write(render_csv(report))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    stream, owned = None, False
    try:
        config = config_from_args(args)
        # fail on unwritable output before computing anything
        stream, owned = _open_output(config.out)
        if config.command == "sweep":
            report = run_sweep(config, stream)
        else:
            runner = {"classify": run_classify, "widths": run_widths, "blocks": run_blocks,
                      "verify": run_verify}[config.command]
            report = runner(config)
            if config.timing:
                report.timing = time.perf_counter() - start
            text = render_csv(report) if config.format == "csv" else render_json(report)
            stream.write(text)
            if config.command == "verify" and owned and config.format == "json":
                _sidecar_csv(config.out, report)
    except (UsageError, ValidationError) as exc:
        print(f"snumbers {args.command}: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"snumbers {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SNumbersError as exc:
        print(f"snumbers {args.command}: {exc}", file=sys.stderr)
        return EXIT_FAILED
    finally:
        if owned and stream is not None:
            stream.close()
    for item in report.items:
        if isinstance(item, dict) and "error" in item:
            print(f"snumbers {config.command}: {item['error']}: {item['message']}", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
