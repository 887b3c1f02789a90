"""Command-line front end.

Exit codes: 0 every verdict passes, 1 some verdict fails, 2 something is
inconclusive (and nothing fails), 3 the configuration or arguments are bad.

Configs are TOML.  Every command that reads one rejects unknown keys and
reports them as ``FILE:LINE:COL: message``.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import datetime
import io
import json
import math
import re
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import tomli
import tomli_w

from . import __version__
from .efun import ClassicExp, ProductSpec, ZeroTerm, loads_spec, truncation_factor
from .orbits import (
    LogAnnulus,
    OrbitReport,
    degree_check,
    example1_h_estimate,
    scan_example1_start,
    stability_check,
    verify_example1,
    verify_example2,
    verify_example3,
)
from .schedules import (
    EX3_DEFAULTS,
    ScheduleError,
    example1_spec,
    generate_example1,
    generate_example2,
    generate_example3,
    schedule_to_csv,
    validate,
)
from .theorems import (
    CheckRequest,
    check_convexity,
    check_harnack,
    check_min_max,
    convexity_threshold,
    covering_lower_bound,
    level_annulus_report,
)
from .verdict import FAIL, INCONCLUSIVE, CheckVerdict, judge, worst_status
from .xlog import PRECISION_ENV, DomainError, XInterval, XReal, get_precision, iv, iv_ln, iv_mul, iv_sub, working_precision

EXIT_PASS, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_CONFIG = 0, 1, 2, 3
SCHEMA_ID = "mcwd-report/1"


class ConfigError(Exception):
    def __init__(self, message: str, source: str = "<config>", line: int | None = None, col: int | None = None):
        super().__init__(message)
        self.message, self.source, self.line, self.col = message, source, line, col

    def __str__(self):
        if self.line is None:
            return f"{self.source}: {self.message}"
        return f"{self.source}:{self.line}:{self.col}: {self.message}"


# ---------------------------------------------------------------------------
# config schema

NUM = "number"      # int, float or a string such as "15/16" or "0.95"
INT = "integer"
BOOL = "boolean"
STR = "string"
NUMS = "number list"
INTS = "integer list"
TABLE = "table"

_TARGET = {
    "kind": STR, "degree": INT, "power": INT, "zeros": NUMS, "log_zeros": NUMS,
    "s1": NUM, "c": NUM, "n_max": INT, "n_hi": INT, "N2": INT, "file": STR,
}
_CHECK_COMMON = {"target": TABLE}

SCHEMA = {
    "run": {"example": INT, "precision": INT, "truncation_factor": INT},
    "example1": {"s1": NUM, "c": NUM, "N2": INT, "N2_max": INT, "n_start": INT, "steps": INT,
                 "track": STR, "beta_override_exp": NUM},
    "example2": {"s1": NUM, "n": INT, "samples": INT, "exclusion": BOOL},
    "example3": {"m1": INT, "log_S1": NUM, "c": NUM, "alpha": NUM, "beta1": NUM,
                 "n_max": INT, "n_values": INTS, "strict": BOOL},
    "output": {"json": STR, "csv": STR},
    "convexity": {**_CHECK_COMMON, "log_radii": NUMS, "log10_radii": NUMS, "c_values": NUMS,
                  "depth": INT, "threshold": NUM, "scan_threshold": BOOL},
    "harnack": {**_CHECK_COMMON, "log_r": NUM, "a": NUM, "b": NUM, "eps": NUMS, "points": INT,
                "log_scale": NUM, "part_b": BOOL},
    "minmax": {**_CHECK_COMMON, "log_r": NUM, "a_bracket": NUMS, "b_bracket": NUMS, "delta": NUM, "points": INT},
    "covering": {**_CHECK_COMMON, "log_inner": NUM, "log_outer": NUM, "inner": NUM, "outer": NUM},
    "degree": {**_CHECK_COMMON, "log_r": NUM, "a_bracket": NUMS, "count": INT, "delta": NUM},
    "levels": {"log_r": NUM, "delta": NUM, "a_n": NUMS, "b_n": NUMS, "l_values": NUMS, "a_limit_lower": NUM},
}


def _is_num(v) -> bool:
    if isinstance(v, bool):
        return False
    if isinstance(v, (int, float)):
        return True
    if isinstance(v, str):
        try:
            _parse_number(v)
            return True
        except ValueError:
            return False
    return False


def _type_ok(kind: str, v) -> bool:
    if kind == NUM:
        return _is_num(v)
    if kind == INT:
        return isinstance(v, int) and not isinstance(v, bool)
    if kind == BOOL:
        return isinstance(v, bool)
    if kind == STR:
        return isinstance(v, str)
    if kind == NUMS:
        return isinstance(v, list) and all(_is_num(x) for x in v)
    if kind == INTS:
        return isinstance(v, list) and all(isinstance(x, int) and not isinstance(x, bool) for x in v)
    if kind == TABLE:
        return isinstance(v, dict)
    raise AssertionError(kind)


_HEADER = re.compile(r"^\s*\[\s*([^\[\]]+?)\s*\]\s*(#.*)?$")
_KEY = re.compile(r'^\s*("?)([A-Za-z0-9_\-]+)\1\s*(\.|=)')


def _locate(text: str, table: tuple, key: str | None) -> tuple:
    """(line, col) of ``key`` inside ``[table]`` (or of the header itself)."""
    cur: tuple = ()
    parent_hit = None
    for i, line in enumerate(text.splitlines(), 1):
        m = _HEADER.match(line)
        if m:
            cur = tuple(p.strip().strip('"') for p in m.group(1).split("."))
            if key is None and cur == table:
                return i, line.index("[") + 1
            continue
        m = _KEY.match(line)
        if not m:
            continue
        if cur == table and key is not None and m.group(2) == key:
            return i, m.start(2) + 1
        # inline or dotted sub-tables: ``target = {...}`` / ``target.kind = ...``
        if len(table) == len(cur) + 1 and cur == table[:-1] and m.group(2) == table[-1]:
            if key is None or re.search(r"\b" + re.escape(key) + r"\s*=", line):
                return i, m.start(2) + 1
            parent_hit = parent_hit or (i, m.start(2) + 1)
    return parent_hit or (None, None)


def _check_table(data: dict, schema: dict, path: tuple, text: str, source: str):
    for key, v in data.items():
        where = ".".join(path)
        if key not in schema:
            line, col = _locate(text, path, key)
            raise ConfigError(f"unknown key '{key}' in [{where}]", source, line, col)
        kind = schema[key]
        if not _type_ok(kind, v):
            line, col = _locate(text, path, key)
            raise ConfigError(f"key '{key}' in [{where}] must be a {kind}", source, line, col)
        if kind == TABLE:
            _check_table(v, _TARGET, path + (key,), text, source)


def _sorted_tree(d):
    if isinstance(d, dict):
        return {k: _sorted_tree(d[k]) for k in sorted(d)}
    if isinstance(d, list):
        return [_sorted_tree(x) for x in d]
    return d


@dataclass(frozen=True)
class RunConfig:
    """A validated config: example id, base parameters, precision, the
    truncation factor B, checker grids and output paths."""

    data: dict
    source: str = "<config>"

    def table(self, name: str) -> dict:
        return dict(self.data.get(name, {}))

    @property
    def example(self) -> int | None:
        return self.data.get("run", {}).get("example")

    @property
    def precision(self) -> int | None:
        return self.data.get("run", {}).get("precision")

    @property
    def truncation_factor(self) -> int | None:
        return self.data.get("run", {}).get("truncation_factor")

    def canonical(self) -> str:
        """Canonical TOML; ``parse_config(c.canonical()).canonical()`` is a fixed point."""
        return tomli_w.dumps(_sorted_tree(self.data))


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        m = re.search(r"\(at line (\d+), column (\d+)\)", str(exc))
        msg = re.sub(r"\s*\(at line \d+, column \d+\)", "", str(exc))
        if m:
            raise ConfigError(msg, source, int(m.group(1)), int(m.group(2))) from None
        raise ConfigError(msg, source) from None
    for name, v in data.items():
        if name not in SCHEMA:
            line, col = _locate(text, (name,), None)
            if line is None:
                line, col = _locate(text, (), name)
            raise ConfigError(f"unknown table '{name}'", source, line, col)
        if not isinstance(v, dict):
            line, col = _locate(text, (), name)
            raise ConfigError(f"'{name}' must be a table", source, line, col)
        _check_table(v, SCHEMA[name], (name,), text, source)
    run = data.get("run", {})
    if "example" in run and run["example"] not in (1, 2, 3):
        line, col = _locate(text, ("run",), "example")
        raise ConfigError("example must be 1, 2 or 3", source, line, col)
    if "precision" in run and run["precision"] < 53:
        line, col = _locate(text, ("run",), "precision")
        raise ConfigError("precision must be at least 53 bits", source, line, col)
    if "truncation_factor" in run and run["truncation_factor"] < 2:
        line, col = _locate(text, ("run",), "truncation_factor")
        raise ConfigError("truncation_factor must be at least 2", source, line, col)
    return RunConfig(data, source)


def load_config(path) -> RunConfig:
    if path is None:
        return RunConfig({})
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", str(p)) from None
    return parse_config(text, str(p))


# ---------------------------------------------------------------------------
# values


def _parse_number(s):
    """int, Fraction, or a decimal string kept exact as a Fraction."""
    if isinstance(s, bool):
        raise ValueError("boolean is not a number")
    if isinstance(s, (int, float)):
        return s
    t = str(s).strip()
    if not t:
        raise ValueError("empty number")
    return Fraction(t)


def _xr(v) -> XReal:
    n = _parse_number(v)
    if isinstance(n, Fraction) and n.denominator != 1:
        return XReal(n)
    return XReal(n if not isinstance(n, Fraction) else n.numerator)


def _log_of(v) -> XInterval:
    """Enclosure of log v; strings ``e^X`` mean ``exp(X)`` exactly."""
    if isinstance(v, str) and v.strip().startswith("e^"):
        return iv(_xr(v.strip()[2:]))
    x = _xr(v)
    if not x > XReal(0):
        raise ConfigError(f"radius {v!r} must be positive")
    return iv_ln(x)


def _num_arg(s: str):
    try:
        return _parse_number(s)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {s!r}") from None


def _bracket(v, name: str) -> XInterval:
    if len(v) != 2:
        raise ConfigError(f"{name} must be a [lo, hi] pair")
    lo, hi = _xr(v[0]), _xr(v[1])
    if hi < lo:
        raise ConfigError(f"{name} must satisfy lo <= hi")
    return XInterval(lo, hi)


def build_target(t: dict, source: str = "<config>"):
    """Function spec described by a ``target`` table."""
    kind = t.get("kind")
    if kind == "monomial":
        d = t.get("degree", t.get("power"))
        if d is None or d < 1:
            raise ConfigError("monomial target needs degree >= 1", source)
        return ProductSpec(d, label=f"z^{d}")
    if kind == "product":
        zs = [_log_of(z) for z in t.get("zeros", [])] + [iv(_xr(z)) for z in t.get("log_zeros", [])]
        zs.sort(key=lambda z: z.lo)
        return ProductSpec(t.get("power", 0), tuple(ZeroTerm(z, 1) for z in zs), label="product")
    if kind == "exp":
        return ClassicExp()
    if kind == "example1":
        n_max = t.get("n_max", 10)
        params = generate_example1(t.get("s1", 10), _xr(t.get("c", 2)), n_max=n_max, N2=t.get("N2"))
        return example1_spec(params, t.get("n_hi", n_max - 1))
    if kind == "file":
        if "file" not in t:
            raise ConfigError("file target needs 'file'", source)
        try:
            return loads_spec(Path(t["file"]).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read spec file: {exc.strerror}", source) from None
    raise ConfigError(f"unknown target kind {kind!r}", source)


# ---------------------------------------------------------------------------
# output


def exit_code(status: str) -> int:
    if status == FAIL:
        return EXIT_FAIL
    if status == INCONCLUSIVE:
        return EXIT_INCONCLUSIVE
    return EXIT_PASS


def _json_default(o):
    if isinstance(o, XReal):
        return o.to_str()
    if isinstance(o, XInterval):
        return [o.lo.to_str(), o.hi.to_str()]
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, CheckVerdict):
        return o.to_dict()
    if isinstance(o, (tuple, set, frozenset)):
        return list(o)
    return str(o)


def _metadata() -> dict:
    return {
        "version": __version__,
        "created_utc": datetime.datetime.now(datetime.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
        "python": sys.version.split()[0],
    }


def make_document(command: str, reports: list, config: RunConfig | None = None, example=None) -> dict:
    """Report document.  Everything outside ``metadata`` is a pure function of
    the inputs; ``strip_metadata`` gives the comparable part."""
    status = worst_status([v for r in reports for v in r.verdicts])
    return {
        "schema": SCHEMA_ID,
        "command": command,
        "example": example,
        "status": status,
        "precision_bits": get_precision(),
        "config": _sorted_tree(config.data) if config is not None else {},
        "reports": [r.to_dict() for r in reports],
        "metadata": _metadata(),
    }


def strip_metadata(doc: dict) -> dict:
    return {k: v for k, v in doc.items() if k != "metadata"}


def dumps_document(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n"


def reports_csv(reports: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["report", "n", "inequality", "status", "margin_log10", "lo", "hi"])
    for r in reports:
        for v in r.sorted_verdicts():
            d = v.to_dict()
            w.writerow([r.name, d["n"], d["inequality"], d["status"], d["margin_log10"], d["lo"], d["hi"]])
    return buf.getvalue()


def rows_csv(rows: list, columns: list | None = None) -> str:
    buf = io.StringIO()
    cols = columns or (list(rows[0]) if rows else [])
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([r.get(c, "") for c in cols])
    return buf.getvalue()


def _write(path, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    p = Path(path)
    if p.parent and not p.parent.exists():
        p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(text)


def _summary(doc: dict):
    counts: dict = {}
    for r in doc["reports"]:
        for v in r["verdicts"]:
            counts[v["status"]] = counts.get(v["status"], 0) + 1
    parts = ", ".join(f"{k} {counts[k]}" for k in sorted(counts))
    print(f"{doc['command']}: {doc['status']} ({parts or 'no verdicts'})", file=sys.stderr)
    for r in doc["reports"]:
        for v in r["verdicts"]:
            if v["status"] in (FAIL, INCONCLUSIVE):
                print(f"  {v['status']:<12} n={v['n']} {v['inequality']} margin_log10={v['margin_log10']}",
                      file=sys.stderr)


def _emit(doc: dict, reports: list, args, cfg: RunConfig | None, extra_csv: str | None = None) -> int:
    out = cfg.table("output") if cfg is not None else {}
    jpath = getattr(args, "json", None) or out.get("json")
    cpath = getattr(args, "csv", None) or out.get("csv")
    if jpath is None and cpath is None:
        jpath = "-"
    if jpath is not None:
        _write(jpath, dumps_document(doc))
    if cpath is not None:
        _write(cpath, extra_csv if extra_csv is not None else reports_csv(reports))
    _summary(doc)
    return exit_code(doc["status"])


# ---------------------------------------------------------------------------
# commands


def _example1_params(t: dict, steps: int, h_levels: int = 0):
    """(params, n_start, scan_report) for an ``[example1]`` table; scans for
    the starting index when N2 is not given."""
    s1, c = t.get("s1", 10), _xr(t.get("c", 2))
    track = t.get("track", "corrected")
    if track not in ("corrected", "literal"):
        raise ConfigError("track must be 'corrected' or 'literal'")
    if "N2" in t:
        N2 = t["N2"]
        n_start = t.get("n_start", N2 * N2)
        params = generate_example1(s1, c, n_max=n_start + max(steps, h_levels) + 5, N2=N2, track=track)
        return params, n_start, None
    N2, rep = scan_example1_start(s1, c, steps, N2_max=t.get("N2_max", 80), track=track)
    if N2 is None:
        return None, None, None
    n_start = N2 * N2
    params = generate_example1(s1, c, n_max=n_start + max(steps, h_levels) + 5, N2=N2, track=track)
    return params, n_start, rep


def _verify(example: int, cfg: RunConfig) -> OrbitReport:
    if example == 1:
        t = cfg.table("example1")
        steps = t.get("steps", 6)
        params, n_start, rep = _example1_params(t, steps)
        if params is None:
            return OrbitReport("example1", [CheckVerdict("scan", None, INCONCLUSIVE, XInterval.whole(), "<", None,
                                                         "no starting index found in the scan range")])
        if "beta_override_exp" in t:
            bov = params.c_power(Fraction(_parse_number(t["beta_override_exp"])))
            rep = verify_example1(params, n_start, steps, beta_override=bov)
            rep.info["beta_override_exp"] = str(t["beta_override_exp"])
        elif rep is None:
            rep = verify_example1(params, n_start, steps)
        rep.info["s1"] = str(t.get("s1", 10))
        rep.info["c"] = str(t.get("c", 2))
        return rep
    if example == 2:
        t = cfg.table("example2")
        n = t.get("n", 3)
        if n < 2:
            raise ConfigError("example2.n must be at least 2")
        m_max = math.factorial(n + 1) ** 2 + 3
        params = generate_example2(t.get("s1", 10), m_max=m_max)
        return verify_example2(params, n, t.get("samples", 12), t.get("exclusion", True))
    if example == 3:
        t = cfg.table("example3")
        n_values = tuple(t.get("n_values", [1, 2]))
        if not n_values or min(n_values) < 1:
            raise ConfigError("example3.n_values must be positive")
        kw = {k: t.get(k, EX3_DEFAULTS[k]) for k in ("m1", "log_S1", "c", "alpha", "beta1")}
        kw = {k: (v if k == "m1" else _xr(v)) for k, v in kw.items()}
        params = generate_example3(n_max=t.get("n_max", max(n_values) + 2), strict=t.get("strict", True), **kw)
        return verify_example3(params, n_values)
    raise ConfigError(f"unknown example {example!r}")


def _check(name: str, cfg: RunConfig) -> tuple:
    """(report, extra_csv) for one checker table."""
    t = cfg.table(name)
    if not t:
        raise ConfigError(f"missing [{name}] table", cfg.source)
    rep = OrbitReport(f"check:{name}")
    if name == "levels":
        for k in ("log_r", "delta", "a_n", "b_n", "l_values"):
            if k not in t:
                raise ConfigError(f"[levels] needs '{k}'", cfg.source)
        rows = level_annulus_report(_xr(t["log_r"]), _xr(t["delta"]), _bracket(t["a_n"], "a_n"),
                                    _bracket(t["b_n"], "b_n"), [_xr(l) for l in t["l_values"]],
                                    _xr(t.get("a_limit_lower", 0)))
        rep.points = rows
        return rep, rows_csv(rows)
    if "target" not in t:
        raise ConfigError(f"[{name}] needs a target table", cfg.source)
    spec = build_target(t["target"], cfg.source)
    rep.info["target"] = _sorted_tree(t["target"])
    if name == "convexity":
        radii = [_xr(x) for x in t.get("log_radii", [])]
        ln10 = iv_ln(XReal(10))
        radii += [iv_mul(ln10, _xr(x)).mid() for x in t.get("log10_radii", [])]
        radii.sort()
        cs = tuple(_xr(c) for c in t.get("c_values", [2]))
        depth = t.get("depth", 1)
        thr = _xr(t["threshold"]) if "threshold" in t else None
        rep.verdicts = check_convexity(CheckRequest(spec, tuple(radii), cs, depth=depth, threshold=thr))
        if t.get("scan_threshold", False):
            best = convexity_threshold(spec, radii, cs, depth)
            rep.info["smallest_passing_log_r"] = None if best is None else best.to_str(12)
        return rep, None
    if name == "harnack":
        _require(t, ("log_r", "a", "b"), name, cfg)
        ls = _xr(t["log_scale"]) if "log_scale" in t else None
        rep.verdicts = check_harnack(spec, _xr(t["log_r"]), _xr(t["a"]), _xr(t["b"]),
                                     [_xr(e) for e in t.get("eps", [])], t.get("points", 9), ls,
                                     t.get("part_b", True))
        return rep, None
    if name == "minmax":
        _require(t, ("log_r", "a_bracket", "b_bracket"), name, cfg)
        delta = _xr(t["delta"]) if "delta" in t else None
        rep.verdicts = check_min_max(spec, _xr(t["log_r"]), _bracket(t["a_bracket"], "a_bracket"),
                                     _bracket(t["b_bracket"], "b_bracket"), delta, t.get("points", 9))
        return rep, None
    if name == "covering":
        lo = iv(_xr(t["log_inner"])) if "log_inner" in t else _log_of(t["inner"]) if "inner" in t else None
        hi = iv(_xr(t["log_outer"])) if "log_outer" in t else _log_of(t["outer"]) if "outer" in t else None
        if lo is None or hi is None:
            raise ConfigError("[covering] needs inner/outer (or log_inner/log_outer)", cfg.source)
        # the annulus must contain the requested one: shrink nothing, round outward
        A = LogAnnulus(lo.lo, hi.hi)
        try:
            res = covering_lower_bound(spec, A)
        except DomainError as exc:
            rep.verdicts = [CheckVerdict("covering", None, INCONCLUSIVE, XInterval.whole(), "<", None, str(exc))]
            return rep, None
        if res is None:
            rep.verdicts = [CheckVerdict("covering", None, INCONCLUSIVE, XInterval.whole(), "<", None,
                                         "M(r) >= m(R): nothing covered")]
            return rep, None
        B, info = res
        rep.verdicts = [judge("covering", None, iv_sub(info["log_m_outer"], info["log_M_inner"]),
                              degree=info["degree"])]
        rep.info.update({"log_inner": B.log_inner.to_str(), "log_outer": B.log_outer.to_str(),
                         "degree": info["degree"]})
        return rep, None
    if name == "degree":
        _require(t, ("log_r", "a_bracket"), name, cfg)
        delta = _xr(t["delta"]) if "delta" in t else None
        rep.verdicts = degree_check(spec, _xr(t["log_r"]), _bracket(t["a_bracket"], "a_bracket"),
                                    t.get("count"), delta)
        return rep, None
    raise ConfigError(f"unknown check {name!r}")


def _require(t: dict, keys, name: str, cfg: RunConfig):
    for k in keys:
        if k not in t:
            raise ConfigError(f"[{name}] needs '{k}'", cfg.source)


def cmd_gen_params(args) -> int:
    ex = args.example
    if ex == 1:
        params = generate_example1(_nz(args.s1, 10), _xr(_nz(args.c, 2)), n_max=args.n_max, N2=args.N2)
    elif ex == 2:
        params = generate_example2(_nz(args.s1, 10), m_max=args.n_max, N2=args.N2)
    else:
        kw = {"m1": _nz(args.m1, EX3_DEFAULTS["m1"])}
        if args.S1 is not None and args.log_S1 is not None:
            raise ConfigError("give --S1 or --log-S1, not both", "<args>")
        if args.S1 is not None:
            kw["log_S1"] = _log_of(args.S1).mid()
        else:
            kw["log_S1"] = _xr(_nz(args.log_S1, EX3_DEFAULTS["log_S1"]))
        for k in ("c", "alpha", "beta1"):
            kw[k] = _xr(_nz(getattr(args, k), EX3_DEFAULTS[k]))
        params = generate_example3(n_max=args.n_max, **kw)
    _write(args.out, schedule_to_csv(params))
    verdicts = validate(params)
    rep = OrbitReport(f"schedule:example{ex}", verdicts)
    doc = make_document("gen-params", [rep], None, ex)
    if args.verdicts:
        _write(args.verdicts, dumps_document(doc))
    _summary(doc)
    return exit_code(doc["status"])


def _nz(v, default):
    return default if v is None else v


def _run_config(args) -> RunConfig:
    cfg = load_config(getattr(args, "config", None))
    return cfg


def cmd_verify(args, cfg: RunConfig) -> int:
    ex = args.example if args.example is not None else cfg.example
    if ex is None:
        raise ConfigError("no example given (use --example or [run] example)", cfg.source)
    if cfg.example is not None and args.example is not None and cfg.example != args.example:
        raise ConfigError(f"--example {args.example} disagrees with [run] example = {cfg.example}", cfg.source)
    rep = _verify(ex, cfg)
    doc = make_document("verify", [rep], cfg, ex)
    return _emit(doc, [rep], args, cfg)


def cmd_check(args, cfg: RunConfig) -> int:
    rep, extra = _check(args.which, cfg)
    doc = make_document(f"check {args.which}", [rep], cfg)
    return _emit(doc, [rep], args, cfg, extra)


def _read_positions(path) -> list:
    out = []
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read points: {exc.strerror}", str(path)) from None
    for i, line in enumerate(text.splitlines(), 1):
        s = line.split("#", 1)[0].strip().rstrip(",")
        if not s or s.lower() in ("u", "position", "point"):
            continue
        try:
            u = Fraction(s.split(",")[0].strip())
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"bad position {s!r}", str(path), i, 1) from None
        if not 0 < u < 1:
            raise ConfigError(f"position {s} outside (0, 1)", str(path), i, 1)
        out.append(u)
    if not out:
        raise ConfigError("no positions", str(path))
    return out


def cmd_h_estimate(args, cfg: RunConfig) -> int:
    if args.example != 1:
        raise ConfigError("h-estimate supports example 1 only", "<args>")
    t = cfg.table("example1")
    if args.N2 is not None:
        t["N2"] = args.N2
    params, n_start, _ = _example1_params(t, 1, h_levels=args.n_max)
    if params is None:
        raise ConfigError("no starting index found in the scan range", cfg.source)
    positions = _read_positions(args.points) if args.points else None
    rep = example1_h_estimate(params, n_start, args.n_max, positions=positions)
    rep.info["positions"] = None if positions is None else [str(u) for u in positions]
    doc = make_document("h-estimate", [rep], cfg, 1)
    table = rows_csv(rep.points, ["point", "n", "lo", "hi"])
    out = cfg.table("output")
    cpath = args.csv or out.get("csv") or "-"
    _write(cpath, table)
    if args.json or out.get("json"):
        _write(args.json or out.get("json"), dumps_document(doc))
    print(f"h-estimate: a-bracket upper {rep.info['a_bracket_upper']}, b-bracket lower {rep.info['b_bracket_lower']}",
          file=sys.stderr)
    return EXIT_INCONCLUSIVE if rep.info["width_blowup"] else EXIT_PASS


def cmd_stability(args, cfg: RunConfig) -> int:
    if args.example != 1:
        raise ConfigError("stability supports example 1 only", "<args>")
    try:
        coeffs = [_xr(c) for c in args.poly.split(",")] if args.poly.strip() else []
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"bad --poly {args.poly!r}", "<args>") from None
    t = cfg.table("example1")
    if args.N2 is not None:
        t["N2"] = args.N2
    params, n_start, _ = _example1_params(t, args.steps)
    if params is None:
        raise ConfigError("no starting index found in the scan range", cfg.source)
    rep = stability_check(params, coeffs, _xr(args.alpha_exp), n_start, args.steps)
    doc = make_document("stability", [rep], cfg, 1)
    return _emit(doc, [rep], args, cfg)


def cmd_report(args) -> int:
    paths = sorted(Path(args.merge).glob("*.json"))
    if not paths:
        raise ConfigError("no JSON reports to merge", args.merge)
    docs = []
    for p in paths:
        try:
            d = json.loads(p.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"unreadable report: {exc}", str(p)) from None
        if d.get("schema") != SCHEMA_ID:
            raise ConfigError("not an mcwd report", str(p))
        docs.append(strip_metadata(d))
    docs.sort(key=lambda d: (d.get("example") or 0, d["command"], json.dumps(d, sort_keys=True)))
    rows = []
    for d in docs:
        for r in d["reports"]:
            for v in r["verdicts"]:
                rows.append({"example": d.get("example"), "report": r["name"], **v})
    rows.sort(key=lambda v: (v["example"] or 0, -1 if v["n"] is None else v["n"], v["inequality"], v["report"]))
    statuses = [v["status"] for v in rows]
    status = FAIL if FAIL in statuses else INCONCLUSIVE if INCONCLUSIVE in statuses else "pass"
    merged = {"schema": SCHEMA_ID, "command": "report", "status": status, "sources": [p.name for p in paths],
              "documents": docs, "verdicts": rows, "metadata": _metadata()}
    _write(args.out, dumps_document(merged))
    print(f"report: {status} ({len(rows)} verdicts from {len(paths)} files)", file=sys.stderr)
    return exit_code(status)


def cmd_config(args, cfg: RunConfig) -> int:
    sys.stdout.write(cfg.canonical())
    return EXIT_PASS


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mcwd", description="Verify wandering-domain constructions with interval bounds.")
    ap.add_argument("--version", action="version", version=f"mcwd {__version__}")
    ap.add_argument("--precision", type=int, help=f"mantissa bits (default: ${PRECISION_ENV} or 53)")
    sub = ap.add_subparsers(dest="command", required=True)

    def outputs(p):
        p.add_argument("--json", help="JSON report path ('-' for stdout)")
        p.add_argument("--csv", help="CSV path ('-' for stdout)")

    p = sub.add_parser("gen-params", help="generate a schedule as CSV and validate it")
    p.add_argument("--example", type=int, choices=(1, 2, 3), required=True)
    p.add_argument("--s1", type=_num_arg)
    p.add_argument("--c", type=_num_arg)
    p.add_argument("--S1", help="S_1, a number or e^X")
    p.add_argument("--log-S1", dest="log_S1", type=_num_arg)
    p.add_argument("--m1", type=int)
    p.add_argument("--alpha", type=_num_arg)
    p.add_argument("--beta1", type=_num_arg)
    p.add_argument("--N2", type=int)
    p.add_argument("--n-max", dest="n_max", type=int, required=True)
    p.add_argument("--out", default="-")
    p.add_argument("--verdicts", help="write validation verdicts as JSON")

    p = sub.add_parser("verify", help="verify one example")
    p.add_argument("--example", type=int, choices=(1, 2, 3))
    p.add_argument("--config")
    outputs(p)

    p = sub.add_parser("check", help="run one general checker")
    p.add_argument("which", choices=("convexity", "harnack", "minmax", "covering", "degree", "levels"))
    p.add_argument("--config", required=True)
    outputs(p)

    p = sub.add_parser("h-estimate", help="h_n enclosures along Example 1")
    p.add_argument("--example", type=int, default=1)
    p.add_argument("--points", help="file with relative log-positions in (0, 1), one per line")
    p.add_argument("--n-max", dest="n_max", type=int, default=6)
    p.add_argument("--N2", type=int)
    p.add_argument("--config")
    outputs(p)

    p = sub.add_parser("stability", help="perturb Example 1 by a polynomial")
    p.add_argument("--example", type=int, default=1)
    p.add_argument("--poly", required=True, help="coefficients c0,c1,... of P")
    p.add_argument("--alpha-exp", dest="alpha_exp", type=_num_arg, required=True)
    p.add_argument("--steps", type=int, default=4)
    p.add_argument("--N2", type=int)
    p.add_argument("--config")
    outputs(p)

    p = sub.add_parser("report", help="merge JSON reports")
    p.add_argument("--merge", required=True, metavar="DIR")
    p.add_argument("--out", default="-")

    p = sub.add_parser("config", help="print the canonical form of a config")
    p.add_argument("config")
    return ap


def _dispatch(args) -> int:
    if args.command == "gen-params":
        return cmd_gen_params(args)
    if args.command == "report":
        return cmd_report(args)
    cfg = _run_config(args)
    handlers = {"verify": cmd_verify, "check": cmd_check, "h-estimate": cmd_h_estimate,
                "stability": cmd_stability, "config": cmd_config}
    bits = args.precision or cfg.precision
    B = cfg.truncation_factor
    with contextlib.ExitStack() as stack:
        if bits is not None:
            stack.enter_context(working_precision(bits))
        if B is not None:
            stack.enter_context(truncation_factor(B))
        return handlers[args.command](args, cfg)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage errors; that code means "inconclusive" here
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_PASS
    if args.precision is not None and args.precision < 53:
        print("mcwd: --precision must be at least 53", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return _dispatch(args)
    except ConfigError as exc:
        print(f"mcwd: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ScheduleError, ValueError) as exc:
        print(f"mcwd: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
