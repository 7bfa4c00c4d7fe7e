"""Batch verification suites with machine-readable reports.

Every suite enumerates its cases in a fixed canonical order, evaluates them
(optionally on a thread pool), and assembles a :class:`CheckReport` in that
same order, so the rendered report does not depend on the worker count.
Inequalities are decided by certified sign evaluation in Q[pi^2]; a strict
claim passes only when the margin is provably nonzero.  Asymptotic claims are
never asserted as limits; they become strict comparisons between two finite
genera.
"""
from __future__ import annotations

import json
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Any, Callable, Iterable, Sequence

from .asymptotics import kappa_limit_target, kappa_limit_value
from .correlators import is_stable, kdv_sides
from .exact import PiValue, pi_eval, pi_eval_ratio, sign, sinh_coeff
from .kappa import KappaMonomial
from .volumes import (
    admissible_vectors,
    bracket,
    dilaton_sides,
    kdv2_sides,
    string_sides,
    volume,
)

__all__ = [
    "Case",
    "CheckReport",
    "SUITES",
    "run_suite",
    "report_schema",
    "suite_monotonicity",
    "suite_domination",
    "suite_tau1_bound",
    "suite_sandwich",
    "suite_identities",
    "suite_a_sequence",
    "suite_ratio_trends",
]

PASS, FAIL, SKIPPED = "pass", "fail", "skipped"
SANDWICH_C = "20pi^2/(10-pi^2)"
TREND_DIGITS = 12
WORKER_STACK = 256 * 1024 * 1024


@dataclass
class Case:
    params: dict
    claim: str
    verdict: str
    margin: str = ""
    reason: str | None = None

    def to_dict(self) -> dict:
        out = {"params": self.params, "claim": self.claim, "verdict": self.verdict, "margin": self.margin}
        if self.reason is not None:
            out["reason"] = self.reason
        return out


@dataclass
class CheckReport:
    suite: str
    params: dict
    cases: list[Case]
    tables: list[dict] = field(default_factory=list)

    @property
    def counts(self) -> dict[str, int]:
        out = {PASS: 0, FAIL: 0, SKIPPED: 0}
        for c in self.cases:
            out[c.verdict] += 1
        return out

    @property
    def passed(self) -> bool:
        return self.counts[FAIL] == 0

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "params": self.params,
            "cases": [c.to_dict() for c in self.cases],
            "summary": dict(self.counts, status=PASS if self.passed else FAIL),
            "tables": self.tables,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        ps = " ".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        lines = [f"suite {self.suite} {ps}".rstrip()]
        for c in self.cases:
            cp = " ".join(f"{k}={_fmt(v)}" for k, v in c.params.items())
            tail = f" margin={c.margin}" if c.margin else ""
            if c.reason:
                tail += f" ({c.reason})"
            lines.append(f"  {c.verdict:<7} {cp}  {c.claim}{tail}")
        for t in self.tables:
            lines.append(f"  table {t['name']}")
            lines.append("    " + "\t".join(t["columns"]))
            for row in t["rows"]:
                lines.append("    " + "\t".join(str(x) for x in row))
        n = self.counts
        status = "PASS" if self.passed else "FAIL"
        lines.append(f"summary {self.suite}: pass={n[PASS]} fail={n[FAIL]} skipped={n[SKIPPED]} -> {status}")
        return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if isinstance(v, (list, tuple)):
        return ",".join(str(x) for x in v) if v else "-"
    return str(v)


def report_schema() -> dict:
    text = resources.files("wpvol").joinpath("schemas/check_report.schema.json").read_text()
    return json.loads(text)


# --- execution ------------------------------------------------------------


def _run(fn: Callable[[Any], Case], items: Sequence, threads: int) -> list[Case]:
    """Evaluate cases, keeping input order whatever the completion order."""
    if threads <= 1 or len(items) <= 1:
        return [_guarded(fn, x) for x in items]
    old = threading.stack_size(WORKER_STACK)
    try:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda x: _guarded(fn, x), items))
    finally:
        threading.stack_size(old)


def _guarded(fn, item) -> Case:
    try:
        return fn(item)
    except ArithmeticError as exc:
        # an uncertifiable sign is a loud failure, never a silent pass
        return Case(_item_params(item), "evaluation", FAIL, reason=f"{type(exc).__name__}: {exc}")


def _item_params(item) -> dict:
    if isinstance(item, dict):
        return item
    g, n, d = item[:3]
    return {"g": g, "n": n, "d": list(d)}


def _stable_pairs(max_complexity: int, n_min: int = 0) -> list[tuple[int, int]]:
    out = []
    for g in range(0, max_complexity // 2 + 2):
        for n in range(n_min, max_complexity + 3):
            if is_stable(g, n) and 2 * g - 2 + n <= max_complexity:
                out.append((g, n))
    return out


def _strict_less(lhs: PiValue, rhs: PiValue) -> tuple[str, str]:
    margin = rhs - lhs
    return (PASS if sign(margin) > 0 else FAIL), str(margin)


def _less_equal(lhs: PiValue, rhs: PiValue) -> tuple[str, str]:
    margin = rhs - lhs
    return (PASS if sign(margin) >= 0 else FAIL), str(margin)


def _br(d: Iterable[int]) -> str:
    return "[" + ",".join(str(x) for x in d) + "]"


# --- inequality suites ----------------------------------------------------


def suite_monotonicity(max_complexity: int = 6, route: str = "def", threads: int = 1) -> CheckReport:
    """[tau_d1 ...] < [tau_(d1-1) ...] whenever d1 > 0."""
    items = []
    for g, n in _stable_pairs(max_complexity, n_min=1):
        for d in admissible_vectors(g, n):
            if not any(d):
                items.append((g, n, d, None))
                continue
            for i, x in enumerate(d):
                if x > 0 and (i == 0 or d[i - 1] != x):
                    items.append((g, n, d, i))

    def check(item) -> Case:
        g, n, d, i = item
        params = {"g": g, "n": n, "d": list(d)}
        if i is None:
            return Case(params, "needs some d_i > 0", SKIPPED, reason="precondition d1 > 0 fails")
        lower = d[:i] + (d[i] - 1,) + d[i + 1 :]
        params["i"] = i
        verdict, margin = _strict_less(bracket(g, d, route), bracket(g, lower, route))
        return Case(params, f"{_br(d)} < {_br(lower)}", verdict, margin)

    return CheckReport("monotonicity", {"max_complexity": max_complexity, "route": route}, _run(check, items, threads))


def suite_domination(max_complexity: int = 6, route: str = "def", threads: int = 1) -> CheckReport:
    """[d]_{g,n} <= V_{g,n}."""
    items = [(g, n, d) for g, n in _stable_pairs(max_complexity, n_min=1) for d in admissible_vectors(g, n)]

    def check(item) -> Case:
        g, n, d = item
        verdict, margin = _less_equal(bracket(g, d, route), volume(g, n, route))
        return Case({"g": g, "n": n, "d": list(d)}, f"{_br(d)} <= V", verdict, margin)

    return CheckReport("domination", {"max_complexity": max_complexity, "route": route}, _run(check, items, threads))


# keys (g, n+1) of the volume on the left; the published cases (0,3), (1,0) count n without the extra point
TAU1_EQUALITY_KEYS = ((0, 4), (1, 1))


def suite_tau1_bound(max_complexity: int = 6, route: str = "def", threads: int = 1) -> CheckReport:
    """V_{g,n+1} <= (pi^2/6) [tau_1 tau_0^n]_{g,n+1}, equality exactly at the two listed keys."""
    items = [(g, m) for g, m in _stable_pairs(max_complexity, n_min=1)]
    sixth = PiValue.monomial(Fraction(1, 6), 1)

    def check(item) -> Case:
        g, m = item
        n = m - 1
        params = {"g": g, "n_plus_1": m}
        if not 3 * g + n - 2 > 0:
            return Case(params, "outside 3g+n-2 > 0", SKIPPED, reason="range condition fails")
        lhs = volume(g, m, route)
        rhs = sixth * bracket(g, (1,) + (0,) * n, route)
        margin = rhs - lhs
        s = sign(margin)
        if (g, m) in TAU1_EQUALITY_KEYS:
            return Case(params, "V = (pi^2/6)[tau1 tau0^n]", PASS if s == 0 else FAIL, str(margin))
        return Case(params, "V < (pi^2/6)[tau1 tau0^n]", PASS if s > 0 else FAIL, str(margin))

    return CheckReport("tau1_bound", {"max_complexity": max_complexity, "route": route}, _run(check, items, threads))


def suite_sandwich(max_complexity: int = 6, route: str = "def", threads: int = 1) -> CheckReport:
    """12(2g-2+n) V_{g,n} < V_{g,n+1} < C (2g-2+n) V_{g,n} with C = 20 pi^2/(10 - pi^2)."""
    items = _stable_pairs(max_complexity, n_min=0)

    def check(item) -> list[Case]:
        g, n = item
        chi = 2 * g - 2 + n
        small = volume(g, n, "def" if n == 0 else route)
        big = volume(g, n + 1, route)
        params = {"g": g, "n": n}
        lo, lo_margin = _strict_less(12 * chi * small, big)
        # big < C chi small  <=>  (10 - pi^2) big < 20 pi^2 chi small, since 10 > pi^2
        ten_minus = PiValue({0: 10, 1: -1})
        hi, hi_margin = _strict_less(ten_minus * big, PiValue.monomial(20 * chi, 1) * small)
        return [
            Case(dict(params, side="lower"), "12(2g-2+n)V_{g,n} < V_{g,n+1}", lo, lo_margin),
            Case(dict(params, side="upper"), f"V_{{g,n+1}} < C(2g-2+n)V_{{g,n}}, C={SANDWICH_C}", hi, hi_margin),
        ]

    cases = [c for pair in _run_multi(check, items, threads) for c in pair]
    return CheckReport("sandwich", {"max_complexity": max_complexity, "route": route}, cases)


def _run_multi(fn, items, threads) -> list[list[Case]]:
    def wrapped(item):
        try:
            return fn(item)
        except ArithmeticError as exc:
            return [Case(_pair_params(item), "evaluation", FAIL, reason=f"{type(exc).__name__}: {exc}")]

    if threads <= 1 or len(items) <= 1:
        return [wrapped(x) for x in items]
    old = threading.stack_size(WORKER_STACK)
    try:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(wrapped, items))
    finally:
        threading.stack_size(old)


def _pair_params(item) -> dict:
    return {"g": item[0], "n": item[1]}


# --- identities -----------------------------------------------------------


def _vectors(n: int, total_max: int) -> list[tuple[int, ...]]:
    """Non-increasing length-n vectors with sum <= total_max."""
    out: list[tuple[int, ...]] = []

    def rec(prefix: tuple, left: int, cap: int):
        if len(prefix) == n:
            out.append(prefix)
            return
        for x in range(min(cap, left), -1, -1):
            rec(prefix + (x,), left - x, x)

    if total_max >= 0:
        rec((), total_max, total_max)
    return out


def suite_identities(max_complexity: int = 5, route: str = "def", threads: int = 1) -> CheckReport:
    """KdV (correlators), and the kdv2 / dilaton / string bracket identities, exhaustively."""
    items: list[tuple] = []
    for g in range(0, max_complexity // 2 + 2):
        for n in range(0, max_complexity + 3):
            # kdv: left side <tau_0 tau_d>_g on n+1 points
            if is_stable(g, n + 1) and 2 * g - 1 + n <= max_complexity:
                items += [("kdv", g, n, d) for d in _vectors(n, 3 * g - 2 + n)]
    for g, n in _stable_pairs(max_complexity):
        items += [("dilaton", g, n, d) for d in admissible_vectors(g, n)]
        if n >= 1:
            items += [("string", g, n, d) for d in admissible_vectors(g, n)]
    for g in range(0, max_complexity // 2 + 2):
        for n in range(0, max_complexity + 1):
            # kdv2: left side [tau_0 tau_1 d]_{g,n+2}
            if is_stable(g, n + 2) and 2 * g + n <= max_complexity:
                items += [("kdv2", g, n, d) for d in _vectors(n, 3 * g - 2 + n)]

    def check(item) -> Case:
        kind, g, n, d = item
        params = {"identity": kind, "g": g, "n": n, "d": list(d)}
        if kind == "kdv":
            lhs, rhs = kdv_sides(g, d)
            diff = str(rhs - lhs)
        else:
            sides = {"dilaton": dilaton_sides, "string": string_sides, "kdv2": kdv2_sides}[kind]
            lhs, rhs = sides(g, n, d, route)
            diff = str(rhs - lhs)
        return Case(params, f"{kind} lhs == rhs", PASS if lhs == rhs else FAIL, diff)

    return CheckReport("identities", {"max_complexity": max_complexity, "route": route}, _run(check, items, threads))


# --- a_L sequence ---------------------------------------------------------


def suite_a_sequence(L_max: int = 30, threads: int = 1) -> CheckReport:
    """a_L = zeta(2L)(1 - 2^(1-2L)): increasing, below 1, gaps ~ 4^-L and decreasing."""
    a = [sinh_coeff(L) for L in range(L_max + 1)]
    one = PiValue.coerce(1)
    items: list[tuple] = []
    items += [("increasing", L) for L in range(L_max)]
    items += [("below_one", L) for L in range(1, L_max + 1)]
    items += [("gap_band", L) for L in range(L_max)]
    items += [("gaps_decreasing", L) for L in range(1, L_max - 1)]

    def check(item) -> Case:
        kind, L = item
        params = {"check": kind, "L": L}
        if kind == "increasing":
            verdict, margin = _strict_less(a[L], a[L + 1])
            return Case(params, "a_L < a_(L+1)", verdict, margin)
        if kind == "below_one":
            verdict, margin = _strict_less(a[L], one)
            return Case(params, "a_L < 1", verdict, margin)
        if kind == "gap_band":
            scaled = (a[L + 1] - a[L]) * 4**L
            lo_ok, _ = _strict_less(PiValue.coerce(Fraction(1, 10)), scaled)
            hi_ok, _ = _strict_less(scaled, PiValue.coerce(10))
            verdict = PASS if lo_ok == hi_ok == PASS else FAIL
            return Case(params, "1/10 < 4^L (a_(L+1) - a_L) < 10", verdict, pi_eval(scaled, 6))
        verdict, margin = _strict_less(a[L + 2] - a[L + 1], a[L + 1] - a[L])
        return Case(params, "a_(L+2) - a_(L+1) < a_(L+1) - a_L", verdict, margin)

    return CheckReport("a_sequence", {"L_max": L_max}, _run(check, items, threads))


# --- large genus trends ---------------------------------------------------


def _abs(v: PiValue) -> PiValue:
    return -v if sign(v) < 0 else v


def _dev_volume_ratio(g: int, n: int) -> tuple[PiValue, PiValue]:
    """|V_{g,n+1}/(2g V_{g,n}) - 4 pi^2| as (numerator, positive denominator)."""
    big, small = volume(g, n + 1, "rec"), _volume_any(g, n)
    return _abs(big - PiValue.monomial(8 * g, 1) * small), 2 * g * small


def _dev_genus_drop(g: int, n: int) -> tuple[PiValue, PiValue]:
    """|V_{g,n}/V_{g-1,n+2} - 1|"""
    top, low = _volume_any(g, n), volume(g - 1, n + 2, "rec")
    return _abs(top - low), low


def _dev_tau1(g: int, n: int) -> tuple[PiValue, PiValue]:
    """|[tau_1 tau_0^(n-1)]_{g,n}/V_{g,n} - 1|"""
    v = volume(g, n, "rec")
    return _abs(bracket(g, (1,) + (0,) * (n - 1), "rec") - v), v


def _volume_any(g: int, n: int) -> PiValue:
    return volume(g, n, "rec")


KAPPA_SAMPLES = (((), {1: 1}), ((), {2: 1}), ((2,), {1: 1}))


def _dev_kappa(sample, g: int) -> tuple[PiValue, PiValue]:
    d, m = sample
    mono = KappaMonomial(m)
    return PiValue.coerce(abs(kappa_limit_value(d, mono, g) - kappa_limit_target(d, mono))), PiValue.coerce(1)


def _smaller(a: tuple[PiValue, PiValue], b: tuple[PiValue, PiValue]) -> tuple[str, str]:
    """a_num/a_den < b_num/b_den with positive denominators."""
    margin = b[0] * a[1] - a[0] * b[1]
    return (PASS if sign(margin) > 0 else FAIL), str(margin)


def _dec(num: PiValue, den: PiValue) -> str:
    return pi_eval_ratio(num, den, TREND_DIGITS)


def _kappa_name(sample) -> str:
    d, m = sample
    k = "*".join(f"k{i}^{e}" if e > 1 else f"k{i}" for i, e in sorted(m.items()))
    return f"d={_fmt(list(d))};m={k}"


def suite_ratio_trends(g_max: int = 12, n_max: int = 0, threads: int = 1) -> CheckReport:
    """Deviation from each limit is strictly smaller at g_max than at ceil(g_max/2)."""
    g_half = -(-g_max // 2)
    quantities: list[tuple[str, Callable[[int], tuple[PiValue, PiValue]], int]] = []
    for n in range(n_max + 1):
        quantities.append((f"V_(g,{n + 1})/(2g V_(g,{n})) vs 4pi^2", lambda g, n=n: _dev_volume_ratio(g, n), 2))
        quantities.append((f"V_(g,{n})/V_(g-1,{n + 2}) vs 1", lambda g, n=n: _dev_genus_drop(g, n), 2))
    quantities.append(("[tau1]_(g,1)/V_(g,1) vs 1", lambda g: _dev_tau1(g, 1), 2))
    for sample in KAPPA_SAMPLES:
        quantities.append((f"kappa limit {_kappa_name(sample)} vs target", lambda g, s=sample: _dev_kappa(s, g), 2))

    # warm the shared volume memo in a fixed order before fanning out
    for g in range(1, g_max + 1):
        for n in range(n_max + 2):
            if is_stable(g, n) and n >= 1:
                volume(g, n, "rec")
        if g >= 2:
            volume(g, 0, "rec")

    def check(item) -> Case:
        name, dev, _ = item
        a, b = dev(g_max), dev(g_half)
        verdict, margin = _smaller(a, b)
        params = {"quantity": name, "g_small": g_half, "g_large": g_max}
        claim = f"dev({g_max}) < dev({g_half}); dev({g_half})={_dec(*b)} dev({g_max})={_dec(*a)}"
        return Case(params, claim, verdict, margin)

    cases = _run(check, quantities, threads)

    def table_rows(item) -> list[list[str]]:
        _, dev, g_lo = item
        return [[str(g), _dec(*dev(g))] for g in range(g_lo, g_max + 1)]

    rows = _run_rows(table_rows, quantities, threads)
    tables = [{"name": f"deviation {q[0]}", "columns": ["g", "deviation"], "rows": r} for q, r in zip(quantities, rows)]

    split_rows = _splitting_table(g_max)
    tables.append({"name": "sum_(g1+g2=g) V_(g1,1) V_(g2,1) / V_(g,0)", "columns": ["g", "ratio"], "rows": split_rows})
    cases.append(
        Case(
            {"quantity": "splitting sum over V_(g,n-2)", "g_small": 2, "g_large": g_max},
            "o(V_(g,n-2)) decay",
            SKIPPED,
            reason="trend table only, no verdict",
        )
    )
    return CheckReport("ratio_trends", {"g_max": g_max, "n_max": n_max}, cases, tables)


def _run_rows(fn, items, threads) -> list:
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    old = threading.stack_size(WORKER_STACK)
    try:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    finally:
        threading.stack_size(old)


def _splitting_table(g_max: int) -> list[list[str]]:
    rows = []
    for g in range(2, g_max + 1):
        total = PiValue()
        for g1 in range(1, g):
            total = total + volume(g1, 1, "rec") * volume(g - g1, 1, "rec")
        rows.append([str(g), _dec(total, volume(g, 0, "rec"))])
    return rows


# --- registry ---------------------------------------------------------------

SUITES: dict[str, Callable[..., CheckReport]] = {
    "monotonicity": suite_monotonicity,
    "domination": suite_domination,
    "tau1_bound": suite_tau1_bound,
    "sandwich": suite_sandwich,
    "identities": suite_identities,
    "a_sequence": suite_a_sequence,
    "ratio_trends": suite_ratio_trends,
}


def run_suite(name: str, threads: int = 1, **params) -> CheckReport:
    try:
        fn = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}") from None
    return fn(threads=threads, **params)
