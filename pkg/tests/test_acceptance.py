"""Acceptance checks, one per criterion.

Each criterion builds a deterministic CheckReport; its text is what the
thread-count comparison (criterion 13) diffs byte for byte. Wall-clock limits
are checked outside the reports so they never leak into the comparison.

Run under pytest for the summary lines, or directly:

    python3 tests/test_acceptance.py [--threads N]
    python3 tests/test_acceptance.py --reports --threads N   # raw report text
"""

from __future__ import annotations

import argparse
import itertools
import os
import subprocess
import sys
import tempfile
import time
from fractions import Fraction

import pytest

from wpvol.asymptotics import b_coeffs, c_value, p_poly, p_poly_oracle, q_render, ratio_fn
from wpvol.correlators import correlator, is_stable, one_point_closed, two_point_oracle
from wpvol.exact import GPoly, GRationalFn, PiValue
from wpvol.verify import TAU1_EQUALITY_KEYS, Case, CheckReport, _run, run_suite
from wpvol.volumes import admissible_vectors, bracket_def, bracket_rec, one_point_coeff

F = Fraction
PASS, FAIL = "pass", "fail"
DEFAULT_THREADS = 4


def _case(params: dict, claim: str, ok: bool, margin: str = "") -> Case:
    return Case(params, claim, PASS if ok else FAIL, margin)


def _pi(c, e: int) -> PiValue:
    return PiValue.monomial(F(c), e)


# --- 1. low-genus coefficient data -----------------------------------------

A_DATA = {
    (1, 0): _pi(F(1, 12), 1),
    (1, 1): _pi(F(1, 2), 0),
    (2, 0): _pi(F(29, 192), 4),
    (2, 1): _pi(F(169, 120), 3),
    (2, 2): _pi(F(139, 12), 2),
    (2, 3): _pi(F(203, 3), 1),
    (2, 4): _pi(210, 0),
    (3, 0): _pi(F(9292841, 4082400), 7),
    (3, 1): _pi(F(8497697, 388800), 6),
    (3, 2): _pi(F(8983379, 45360), 5),
    (3, 3): _pi(F(127189, 81), 4),
    (3, 4): _pi(F(94418, 9), 3),
    (3, 5): _pi(F(166364, 3), 2),
    (3, 6): _pi(F(616616, 3), 1),
    (3, 7): _pi(400400, 0),
}


def criterion_1(threads: int) -> CheckReport:
    def check(key):
        got = one_point_coeff(*key)
        return _case({"g": key[0], "k": key[1]}, f"a = {A_DATA[key]}", got == A_DATA[key], str(got))

    return CheckReport("c1_one_point_data", {}, _run(check, sorted(A_DATA), threads))


# --- 2. table of Q values ---------------------------------------------------

TABLE = {
    1: ["1.000438", "1.000106", "1.000047", "1.000026", "1.000016"],
    2: ["1.001334", "1.000326", "1.000144", "1.000080", "1.000051"],
    3: ["1.002300", "1.000563", "1.000248", "1.000139", "1.000089"],
    4: ["1.003090", "1.000759", "1.000335", "1.000188", "1.000120"],
}
TABLE_G = (20, 40, 60, 80, 100)


def criterion_2(threads: int) -> CheckReport:
    items = [(k, g, TABLE[k][i]) for k in TABLE for i, g in enumerate(TABLE_G)]

    def check(item):
        k, g, want = item
        got = q_render(k, g)
        return _case({"k": k, "g": g}, f"Q = {want}", got == want, got)

    return CheckReport("c2_q_table", {"digits": 6}, _run(check, items, threads))


# --- 3. closed-form ratio functions ----------------------------------------

G = GPoly.g()
RATIO_FORMS = {
    1: GRationalFn(12 * G * G - 12 * G + 5, 6 * G * (2 * G - 1)),
    2: GRationalFn((G - 1) * (1008 * G**3 - 1200 * G**2 + 888 * G - 175), 84 * G**2 * (2 * G - 1) * (6 * G - 5)),
}


def criterion_3(threads: int) -> CheckReport:
    def check(k):
        got = ratio_fn(k)
        return _case({"k": k}, f"fn = {RATIO_FORMS[k]}", got == RATIO_FORMS[k], str(got))

    return CheckReport("c3_ratio_fn", {}, _run(check, sorted(RATIO_FORMS), threads))


# --- 4. b coefficients -------------------------------------------------------


def criterion_4(threads: int) -> CheckReport:
    items = [("b1", k) for k in range(1, 9)] + [("series", 1, 3), ("series", 2, 2)]
    series = {(1, 3): [F(1), F(-1, 2), F(1, 6), F(1, 12)], (2, 2): [F(1), F(-6, 7), F(43, 84)]}

    def check(item):
        if item[0] == "b1":
            k = item[1]
            want, got = F(k * k, 14) - F(4 * k, 7), b_coeffs(k, 1)[1]
            return _case({"k": k, "order": 1}, f"b1 = {want}", got == want, str(got))
        k, order = item[1:]
        want, got = series[(k, order)], b_coeffs(k, order)
        return _case({"k": k, "order": order}, f"b = {[str(x) for x in want]}", got == want, str([str(x) for x in got]))

    return CheckReport("c4_b_coeffs", {}, _run(check, items, threads))


# --- 5. C closed forms -------------------------------------------------------

C_FORMS = {
    (1,): lambda g: 1 - F(1, 2 * g),
    (2,): lambda g: 1 - F(1, g) + F(5, 12 * g * g),
    (3,): lambda g: 1 - F(11, 6 * g) + F(95, 72 * g**2) - F(35, 72 * g**3),
    (2, 2): lambda g: 1 - F(11, 6 * g) + F(17, 12 * g**2) - F(7, 12 * g**3),
}


def criterion_5(threads: int) -> CheckReport:
    items = [(d, g) for d in C_FORMS for g in range(2, 9)]

    def check(item):
        d, g = item
        want, got = C_FORMS[d](g), c_value(d, g)
        return _case({"d": list(d), "g": g}, f"C = {want}", got == want, str(got))

    return CheckReport("c5_c_forms", {}, _run(check, items, threads))


# --- 6. P polynomials --------------------------------------------------------


def p_vectors(size_max: int = 6, n_max: int = 3):
    for n in range(1, n_max + 1):
        for d in itertools.combinations_with_replacement(range(size_max + 1), n):
            if sum(d) <= size_max:
                yield d


def criterion_6(threads: int) -> CheckReport:
    def check(d):
        p = p_poly(d)
        k = sum(d)
        cases = [
            ("integral", p.is_integral()),
            ("lead", p.degree == k and p.lead == 6**k),
            ("oracle", p == p_poly_oracle(d)),
        ]
        failed = [name for name, ok in cases if not ok]
        claim = "P in Z[g], lead 6^|d| g^|d|, P = oracle"
        return _case({"d": list(d)}, claim, not failed, ("failed: " + ",".join(failed)) if failed else str(p))

    return CheckReport("c6_p_poly", {"size_max": 6, "n_max": 3}, _run(check, list(p_vectors()), threads))


# --- 7. correlator engine oracles -------------------------------------------


def criterion_7(threads: int) -> CheckReport:
    items = [("one", g) for g in range(1, 16)]
    items += [("two", g, a, 3 * g - 1 - a) for g in range(0, 9) for a in range(3 * g)]

    def check(item):
        if item[0] == "one":
            g = item[1]
            got, want = correlator(g, (3 * g - 2,)), one_point_closed(g)
            return _case({"g": g, "d": [3 * g - 2]}, f"<tau> = {want}", got == want, str(got))
        g, a, b = item[1:]
        got, want = correlator(g, (a, b)), two_point_oracle(a, b)
        return _case({"g": g, "d": [a, b]}, f"<tau tau> = {want}", got == want, str(got))

    return CheckReport("c7_engine_oracles", {"one_g_max": 15, "two_g_max": 8}, _run(check, items, threads))


# --- 8. cross-path brackets -------------------------------------------------


def criterion_8(threads: int) -> CheckReport:
    # the recursion needs a boundary, so n >= 1
    items = [
        (g, n, d)
        for g in range(0, 5)
        for n in range(1, 10)
        if is_stable(g, n) and 2 * g - 2 + n <= 7
        for d in admissible_vectors(g, n)
    ]

    def check(item):
        g, n, d = item
        a, b = bracket_rec(g, n, d), bracket_def(g, n, d)
        return _case({"g": g, "n": n, "d": list(d)}, "rec = def", a == b, str(b))

    return CheckReport("c8_cross_path", {"max_complexity": 7}, _run(check, items, threads))


# --- 9 to 12. verifier suites -----------------------------------------------


def criterion_9(threads: int) -> CheckReport:
    return run_suite("identities", threads=threads, max_complexity=5)


def criterion_10(threads: int) -> list[CheckReport]:
    return [run_suite(name, threads=threads, max_complexity=6) for name in ("monotonicity", "domination", "tau1_bound", "sandwich")]


def criterion_11(threads: int) -> CheckReport:
    return run_suite("a_sequence", threads=threads, L_max=30)


def criterion_12(threads: int) -> CheckReport:
    return run_suite("ratio_trends", threads=threads, g_max=12)


def equality_keys(report: CheckReport) -> list[tuple[int, int]]:
    return sorted((c.params["g"], c.params["n_plus_1"]) for c in report.cases if c.margin == "0")


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 13)}
TIME_LIMITS = {1: 60, 2: 60, 6: 600, 8: 1800}


def reports(number: int, threads: int) -> list[CheckReport]:
    out = CRITERIA[number](threads)
    return out if isinstance(out, list) else [out]


def evaluate(number: int, threads: int) -> tuple[bool, str, str]:
    """(ok, one-line detail, full report text) for criterion 1..12."""
    start = time.perf_counter()
    rs = reports(number, threads)
    elapsed = time.perf_counter() - start
    ok = all(r.passed for r in rs)
    counts = [r.counts for r in rs]
    detail = " ".join(f"{r.suite}[pass={c['pass']} fail={c['fail']} skipped={c['skipped']}]" for r, c in zip(rs, counts))
    if number == 10:
        keys = equality_keys(rs[2])
        ok = ok and keys == sorted(TAU1_EQUALITY_KEYS)
        detail += f" tau1 equality at {keys}"
    if number in TIME_LIMITS:
        ok = ok and elapsed < TIME_LIMITS[number]
        detail += f" {elapsed:.1f}s (limit {TIME_LIMITS[number]}s)"
    if not ok:
        bad = [f"{r.suite}:{c.params}:{c.margin or c.reason}" for r in rs for c in r.cases if c.verdict == FAIL]
        detail += " failing " + "; ".join(bad[:5]) + (" ..." if len(bad) > 5 else "")
    return ok, detail, "\n".join(r.to_text() for r in rs)


def report_bundle(threads: int) -> str:
    return "\n".join(f"== criterion {i}\n" + evaluate(i, threads)[2] for i in CRITERIA)


def _bundle_in_subprocess(threads: int) -> str:
    # fresh interpreters so neither run benefits from the other's memo tables
    proc = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--reports", "--threads", str(threads)],
        capture_output=True,
        text=True,
        check=True,
    )
    return proc.stdout


def criterion_13(threads: int) -> tuple[bool, str]:
    one = _bundle_in_subprocess(1)
    many = _bundle_in_subprocess(threads)
    if one == many:
        return True, f"{len(one)} bytes, threads 1 vs {threads}: identical"
    out = tempfile.mkdtemp(prefix="wpvol-determinism-")
    for name, text in (("threads1.txt", one), (f"threads{threads}.txt", many)):
        with open(os.path.join(out, name), "w") as fh:
            fh.write(text)
    a, b = one.splitlines(), many.splitlines()
    line = next((i for i, (x, y) in enumerate(zip(a, b)) if x != y), min(len(a), len(b)))
    return False, f"threads 1 vs {threads}: DIFFERENT from line {line + 1}; both bundles kept in {out}"


# --- pytest ---------------------------------------------------------------


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, acceptance_record):
    ok, detail, _ = evaluate(number, threads=DEFAULT_THREADS)
    acceptance_record(number, ok, detail)
    assert ok, detail


def test_criterion_13_determinism(acceptance_record):
    ok, detail = criterion_13(DEFAULT_THREADS)
    acceptance_record(13, ok, detail)
    assert ok, detail


def main(argv=None) -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--threads", type=int, default=DEFAULT_THREADS)
    ap.add_argument("--reports", action="store_true", help="print report text for criteria 1-12")
    args = ap.parse_args(argv)
    if args.reports:
        sys.stdout.write(report_bundle(args.threads))
        return 0
    all_ok = True
    for i in CRITERIA:
        ok, detail, _ = evaluate(i, args.threads)
        all_ok &= ok
        print(f"criterion {i:2d}: {'PASS' if ok else 'FAIL'}  {detail}", flush=True)
    ok, detail = criterion_13(args.threads)
    all_ok &= ok
    print(f"criterion 13: {'PASS' if ok else 'FAIL'}  {detail}")
    return 0 if all_ok else 1


if __name__ == "__main__":
    sys.exit(main())
