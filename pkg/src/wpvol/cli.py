"""Command-line entry point: ``wpvol <command> ...``.

Exit codes: 0 success, 1 a verification failed (or a def/rec mismatch),
2 usage or input error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import asymptotics, correlators, verify, volumes
from ._version import __version__
from .exact import COMPARE_MAX_DIGITS, PiValue, pi_eval

FORMATS = ("text", "json", "csv", "tsv")
CONFIG_KEYS = {"cache_path", "precision_digits", "threads", "output_format"}
DEFAULTS = {"cache_path": None, "precision_digits": 100, "threads": 1, "output_format": "text"}
ENV = {"cache_path": "WPVOL_CACHE", "threads": "WPVOL_THREADS", "precision_digits": "WPVOL_DIGITS"}


class UsageError(Exception):
    pass


@dataclass
class Config:
    cache_path: str | None
    precision_digits: int
    threads: int
    output_format: str
    digits_explicit: bool = False


def _threads(value) -> int:
    if value == "auto":
        return os.cpu_count() or 1
    n = int(value)
    if n < 1:
        raise ValueError("threads must be >= 1")
    return n


def _digits(value) -> int:
    n = int(value)
    if not 0 <= n <= COMPARE_MAX_DIGITS:
        raise ValueError(f"precision_digits must be in [0, {COMPARE_MAX_DIGITS}]")
    return n


def _check(key: str, value):
    try:
        if key == "threads":
            return _threads(value)
        if key == "precision_digits":
            return _digits(value)
        if key == "output_format":
            if value not in FORMATS:
                raise ValueError(f"output_format must be one of {FORMATS}")
            return value
        return None if value is None else str(value)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"{key}: {exc}") from None


def load_config_file(path: str | os.PathLike) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    unknown = sorted(set(data) - CONFIG_KEYS)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    return data


def resolve_config(args: argparse.Namespace, environ=None) -> Config:
    """flags > WPVOL_* environment > config file > defaults"""
    environ = os.environ if environ is None else environ
    layers: dict = dict(DEFAULTS)
    explicit = set()
    cfg_path = args.config or environ.get("WPVOL_CONFIG")
    if cfg_path:
        for k, v in load_config_file(cfg_path).items():
            layers[k] = v
            explicit.add(k)
    for key, var in ENV.items():
        if var in environ:
            layers[key] = environ[var]
            explicit.add(key)
    flags = {"cache_path": args.cache, "precision_digits": args.digits, "threads": args.threads, "output_format": args.format}
    for k, v in flags.items():
        if v is not None:
            layers[k] = v
            explicit.add(k)
    values = {k: _check(k, layers[k]) for k in CONFIG_KEYS}
    return Config(**values, digits_explicit="precision_digits" in explicit)


# --- output --------------------------------------------------------------


@dataclass
class Output:
    text: str
    rows: list[dict]
    data: object = None

    def render(self, fmt: str) -> str:
        if fmt == "text":
            return self.text if self.text.endswith("\n") else self.text + "\n"
        if fmt == "json":
            payload = self.data if self.data is not None else self.rows
            return json.dumps(payload, indent=2, sort_keys=True) + "\n"
        buf = io.StringIO()
        cols = list(self.rows[0]) if self.rows else []
        writer = csv.writer(buf, delimiter="\t" if fmt == "tsv" else ",", lineterminator="\n")
        writer.writerow(cols)
        for row in self.rows:
            writer.writerow([_cell(row[c]) for c in cols])
        return buf.getvalue()


def _cell(v) -> str:
    if isinstance(v, (list, tuple)):
        return ",".join(str(x) for x in v)
    return str(v)


def _int_list(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        out = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None
    if any(x < 0 for x in out):
        raise UsageError("indices must be nonnegative")
    return out


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _decimal(v: PiValue, cfg: Config) -> str | None:
    return pi_eval(v, cfg.precision_digits, COMPARE_MAX_DIGITS) if cfg.digits_explicit else None


# --- commands --------------------------------------------------------------


def cmd_correlator(args, cfg: Config) -> tuple[Output, int]:
    d = _int_list(args.d)
    value = correlators.correlator(args.g, d)
    n = len(d)
    if sum(d) != 3 * args.g - 3 + n:
        print(f"note: dimension mismatch, sum d = {sum(d)} != 3g-3+n = {3 * args.g - 3 + n}", file=sys.stderr)
    row = {"g": args.g, "d": list(d), "value": str(value)}
    return Output(str(value), [row], row), 0


def _n_and_d(args) -> tuple[int, tuple[int, ...]]:
    d = _int_list(args.d)
    n = len(d) if args.n is None else args.n
    if n != len(d):
        raise UsageError(f"--n {n} does not match {len(d)} indices")
    return n, d


def cmd_bracket(args, cfg: Config) -> tuple[Output, int]:
    n, d = _n_and_d(args)
    routes = ("def", "rec") if args.route == "both" else (args.route,)
    values = {}
    for r in routes:
        fn = volumes.bracket_def if r == "def" else volumes.bracket_rec
        values[r] = fn(args.g, n, d)
    first = values[routes[0]]
    row = {"g": args.g, "n": n, "d": list(d), "value": str(first)}
    lines = [str(first)]
    code = 0
    if args.route == "both":
        ok = values["def"] == values["rec"]
        row["check"] = "match" if ok else "mismatch"
        lines.append(row["check"])
        if not ok:
            lines.append(f"rec: {values['rec']}")
            code = 1
    dec = _decimal(first, cfg)
    if dec is not None:
        row["decimal"] = dec
        lines.append(dec)
    return Output("\n".join(lines), [row], row), code


def cmd_volume_poly(args, cfg: Config) -> tuple[Output, int]:
    vp = volumes.volume_polynomial(args.g, args.n, args.route)
    text = volumes.export_volume_polynomial(vp)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    rows = [{"d": list(d), "coefficient": str(c)} for d, c in sorted(vp.coefficients.items(), reverse=True) if list(d) == sorted(d, reverse=True)]
    return Output(text, rows, {"g": args.g, "n": args.n, "coefficients": rows}), 0


def _length(text: str) -> Fraction:
    try:
        v = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad length {text!r}") from None
    if v < 0:
        raise UsageError("lengths must be nonnegative")
    return v


def cmd_eval(args, cfg: Config) -> tuple[Output, int]:
    lengths = [_length(x) for x in args.lengths.split(",")] if args.lengths.strip() else []
    if len(lengths) != args.n:
        raise UsageError(f"expected {args.n} lengths, got {len(lengths)}")
    vp = volumes.volume_polynomial(args.g, args.n, args.route)
    value = volumes.evaluate_volume(vp, lengths, cfg.precision_digits)
    row = {"g": args.g, "n": args.n, "lengths": [str(x) for x in lengths], "value": value}
    return Output(value, [row], row), 0


def cmd_q_table(args, cfg: Config) -> tuple[Output, int]:
    g_list = list(_int_list(args.g_list))
    if not g_list:
        raise UsageError("empty --g-list")
    table = asymptotics.q_table(args.k_max, g_list, args.rounding)
    rows = [{"k": k, "g": g, "Q": q} for k, g, q in table]
    width = max(len(q) for _, _, q in table)
    head = "k\\g  " + "  ".join(str(g).rjust(width) for g in g_list)
    lines = [head]
    for k in range(1, args.k_max + 1):
        cells = [q for kk, _, q in table if kk == k]
        lines.append(f"{k:<5}" + "  ".join(c.rjust(width) for c in cells))
    return Output("\n".join(lines), rows), 0


def cmd_ratio_fn(args, cfg: Config) -> tuple[Output, int]:
    fn = asymptotics.ratio_fn(args.k)
    row = {"k": args.k, "fn": str(fn)}
    lines = [str(fn)]
    if args.order is not None:
        bs = asymptotics.b_coeffs(args.k, args.order)
        row["b"] = [str(b) for b in bs]
        lines.append("b: " + ", ".join(row["b"]))
    return Output("\n".join(lines), [row], row), 0


def cmd_p_poly(args, cfg: Config) -> tuple[Output, int]:
    d = _int_list(args.d)
    p = asymptotics.p_poly(d)
    row = {"d": list(d), "poly": str(p)}
    lines = [str(p)]
    code = 0
    if args.check:
        ok = p == asymptotics.p_poly_oracle(d)
        row["oracle"] = "match" if ok else "mismatch"
        row["oracle_base_g"] = asymptotics.oracle_base_point(d)
        lines.append(f"oracle {row['oracle']} (interpolation from g={row['oracle_base_g']})")
        code = 0 if ok else 1
    return Output("\n".join(lines), [row], row), code


def _suite_params(args) -> dict:
    p = {}
    if args.max_complexity is not None:
        p["max_complexity"] = args.max_complexity
    if args.L_max is not None:
        p["L_max"] = args.L_max
    if args.g_max is not None:
        p["g_max"] = args.g_max
    if args.n_max is not None:
        p["n_max"] = args.n_max
    if args.route is not None:
        p["route"] = args.route
    return p


def cmd_verify(args, cfg: Config) -> tuple[Output, int]:
    names = list(verify.SUITES) if args.suite == "all" else [args.suite]
    reports = []
    for name in names:
        fn = verify.SUITES[name]
        params = {k: v for k, v in _suite_params(args).items() if k in fn.__code__.co_varnames}
        reports.append(fn(threads=cfg.threads, **params))
    text = "".join(r.to_text() for r in reports)
    rows = [dict(suite=r.suite, params=r.params, claim=c.claim, verdict=c.verdict, margin=c.margin) | c.params for r in reports for c in r.cases]
    data = reports[0].to_dict() if len(reports) == 1 else [r.to_dict() for r in reports]
    return Output(text, rows, data), 0 if all(r.passed for r in reports) else 1


def cmd_cache(args, cfg: Config) -> tuple[Output, int]:
    store = correlators.default_store()
    if args.action == "stats":
        row = {
            "entries": len(store),
            "path": cfg.cache_path or "",
            "format": store.format_version,
            "engine": store.engine_version,
        }
        text = "\n".join(f"{k} {v}" for k, v in row.items())
        return Output(text, [row], row), 0
    if args.action == "clear":
        store.clear()
        if cfg.cache_path:
            correlators.cache_save(cfg.cache_path, store)
        return Output("cleared", [{"entries": 0}]), 0
    target = args.out or cfg.cache_path
    if not target:
        raise UsageError("cache export needs --out or a cache path")
    n = correlators.cache_save(target, store)
    return Output(f"exported {n} entries to {target}", [{"entries": n, "path": target}]), 0


# --- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file (keys: %s)" % ", ".join(sorted(CONFIG_KEYS)))
    common.add_argument("--cache", help="correlator cache file, loaded before and saved after the command")
    common.add_argument("--digits", help="decimal places for numeric output (<= %d)" % COMPARE_MAX_DIGITS)
    common.add_argument("--threads", help="worker threads, an integer or 'auto'")
    common.add_argument("--format", choices=FORMATS)

    p = argparse.ArgumentParser(prog="wpvol", description="Exact Weil-Petersson volumes and intersection numbers.")
    p.add_argument("--version", action="version", version=f"wpvol {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("correlator", parents=[common], help="<tau_d1 ... tau_dn>_g")
    s.add_argument("--g", type=_nonneg, required=True)
    s.add_argument("--d", required=True, help="comma-separated indices")
    s.set_defaults(func=cmd_correlator)

    s = sub.add_parser("bracket", parents=[common], help="[tau_d1 ... tau_dn]_{g,n}")
    s.add_argument("--g", type=_nonneg, required=True)
    s.add_argument("--n", type=_nonneg)
    s.add_argument("--d", required=True)
    s.add_argument("--route", choices=("def", "rec", "both"), default="def")
    s.set_defaults(func=cmd_bracket)

    s = sub.add_parser("volume-poly", parents=[common], help="coefficients of V_{g,n}(2L)")
    s.add_argument("--g", type=_nonneg, required=True)
    s.add_argument("--n", type=_nonneg, required=True)
    s.add_argument("--route", choices=volumes.ROUTES, default="def")
    s.add_argument("--out")
    s.set_defaults(func=cmd_volume_poly)

    s = sub.add_parser("eval", parents=[common], help="V_{g,n}(L_1, ..., L_n) as a decimal")
    s.add_argument("--g", type=_nonneg, required=True)
    s.add_argument("--n", type=_nonneg, required=True)
    s.add_argument("--lengths", required=True, help="comma-separated decimals or fractions")
    s.add_argument("--route", choices=volumes.ROUTES, default="def")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("q-table", parents=[common], help="Q_{k,g} convergence table")
    s.add_argument("--k-max", type=_nonneg, required=True)
    s.add_argument("--g-list", required=True)
    s.add_argument("--rounding", choices=asymptotics.ROUNDING_MODES, default="truncate")
    s.set_defaults(func=cmd_q_table)

    s = sub.add_parser("ratio-fn", parents=[common], help="a_{g,3g-2-k}/(g^k a_{g,3g-2}) as a rational function")
    s.add_argument("--k", type=_nonneg, required=True)
    s.add_argument("--order", type=_nonneg, help="also print the 1/g expansion to this order")
    s.set_defaults(func=cmd_ratio_fn)

    s = sub.add_parser("p-poly", parents=[common], help="the integer-valued polynomial P_d(g)")
    s.add_argument("--d", required=True)
    s.add_argument("--check", action="store_true", help="compare with the interpolation oracle")
    s.set_defaults(func=cmd_p_poly)

    s = sub.add_parser("verify", parents=[common], help="run verification suites")
    s.add_argument("suite", choices=list(verify.SUITES) + ["all"])
    s.add_argument("--max-complexity", type=_nonneg)
    s.add_argument("--L-max", dest="L_max", type=_nonneg)
    s.add_argument("--g-max", type=_nonneg)
    s.add_argument("--n-max", type=_nonneg)
    s.add_argument("--route", choices=volumes.ROUTES)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("cache", parents=[common], help="correlator cache management")
    s.add_argument("action", choices=("stats", "clear", "export"))
    s.add_argument("--out")
    s.set_defaults(func=cmd_cache)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        clearing = args.command == "cache" and args.action == "clear"
        if cfg.cache_path and Path(cfg.cache_path).exists() and not clearing:
            correlators.cache_load(cfg.cache_path)
        out, code = args.func(args, cfg)
    except UsageError as exc:
        print(f"wpvol: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ZeroDivisionError) as exc:
        print(f"wpvol: error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(out.render(cfg.output_format))
    if cfg.cache_path and args.command != "cache":
        correlators.cache_save(cfg.cache_path)
    return code


if __name__ == "__main__":
    sys.exit(main())
