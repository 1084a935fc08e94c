#!/usr/bin/env python3
"""Cross-check exported ILPs against an independent MILP solver.

For every bundled WCIR fixture and every objective, exports the ILP in LP
format, re-solves it with scipy's HiGHS backend, and compares the optimum
against the toolkit's own exact machine-row output. Usage:

    check_lp.py <wcat-binary> <fixture-dir>

Exits 0 on agreement, 1 on any mismatch, and 77 (the ctest skip code)
when scipy is not installed.
"""

import glob
import os
import re
import subprocess
import sys
from fractions import Fraction

OBJECTIVES = ("wcet", "wcec-always-on", "wcec-device-aware")
PICO = Fraction(1, 10**12)
NANO = Fraction(1, 10**9)


def run(argv):
    return subprocess.run(argv, check=True, capture_output=True, text=True).stdout


def parse_terms(text):
    """`0.5 x + y - 2 z` -> {'x': 1/2, 'y': 1, 'z': -2}."""
    tokens = text.replace("+", " + ").replace("-", " - ").split()
    terms = {}
    sign, coeff = 1, None
    for tok in tokens:
        if tok == "+":
            sign, coeff = 1, None
        elif tok == "-":
            sign, coeff = -1, None
        elif re.fullmatch(r"[0-9.]+", tok):
            coeff = Fraction(tok)
        else:
            terms[tok] = terms.get(tok, 0) + sign * (coeff if coeff is not None else 1)
            sign, coeff = 1, None
    return terms


def parse_lp(text):
    objective, constraints, integers = {}, [], set()
    section = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("\\"):
            continue
        low = line.lower()
        if low in ("maximize", "subject to", "bounds", "generals", "end"):
            section = low
            continue
        if section == "maximize":
            objective = parse_terms(line.split(":", 1)[1])
        elif section == "subject to":
            body = line.split(":", 1)[1]
            m = re.match(r"(.*?)(<=|>=|=)(.*)$", body)
            constraints.append((parse_terms(m.group(1)), m.group(2), Fraction(m.group(3).strip())))
        elif section == "bounds":
            assert line.endswith(">= 0"), f"unexpected bound: {line}"
        elif section == "generals":
            integers.update(line.split())
    return objective, constraints, integers


def solve_lp(text):
    import numpy as np
    from scipy.optimize import Bounds, LinearConstraint, milp

    objective, constraints, integers = parse_lp(text)
    variables = sorted({v for terms, _, _ in constraints for v in terms} | set(objective))
    index = {v: i for i, v in enumerate(variables)}

    c = np.zeros(len(variables))
    for v, coeff in objective.items():
        c[index[v]] = -float(coeff)  # milp minimizes

    rows, lo, hi = [], [], []
    for terms, rel, rhs in constraints:
        row = np.zeros(len(variables))
        for v, coeff in terms.items():
            row[index[v]] = float(coeff)
        rows.append(row)
        lo.append(float(rhs) if rel in ("=", ">=") else -np.inf)
        hi.append(float(rhs) if rel in ("=", "<=") else np.inf)

    integrality = np.array([1 if v in integers else 0 for v in variables])
    res = milp(
        c=c,
        constraints=LinearConstraint(np.array(rows), lo, hi),
        integrality=integrality,
        bounds=Bounds(0, np.inf),
        options={"mip_rel_gap": 0},
    )
    assert res.status == 0, f"HiGHS status {res.status}: {res.message}"
    return -res.fun


def main():
    if len(sys.argv) != 3:
        print(__doc__)
        return 1
    try:
        import scipy  # noqa: F401
    except ImportError:
        print("scipy unavailable; skipping the external solver cross-check")
        return 77

    wcat, fixdir = sys.argv[1], sys.argv[2]
    paths = sorted(glob.glob(os.path.join(fixdir, "functions", "*.wcir")))
    paths += [os.path.join(fixdir, "tx_task.wcir"), os.path.join(fixdir, "tx_task_standby_wait.wcir")]

    checked = 0
    for path in paths:
        row = run([wcat, "analyze", "--machine", path]).split()
        assert row[0] == "row", row
        expected = {
            "wcet": Fraction(row[2]),
            "wcec-always-on": Fraction(row[4]) * PICO,
            "wcec-device-aware": Fraction(row[5]) * PICO,
        }
        for objective in OBJECTIVES:
            lp_text = run([wcat, "export-lp", "--objective", objective, path])
            got = solve_lp(lp_text)
            want = float(expected[objective])
            if abs(got - want) > max(1e-12, 1e-9 * abs(want)):
                print(f"MISMATCH {os.path.basename(path)} {objective}: "
                      f"HiGHS {got!r} vs exact {want!r}")
                return 1
            checked += 1
    print(f"{checked} objective solves agree with HiGHS")
    return 0


if __name__ == "__main__":
    sys.exit(main())
