"""Fit the implied constants on the calibration grids and freeze them.

Writes ``src/etatheta/calibration.py``.  The assertion grids in
:mod:`etatheta.checks` are disjoint from the grids used here.

    python scripts/calibrate_constants.py [--out PATH]
"""

import argparse
import math
import sys
import time
from pathlib import Path

import numpy as np

from etatheta import asymptotics, checks, circle_method

SLACK = 2.0

TEMPLATE = '''"""Frozen constants for the bounded-by-constant checks.

Generated by ``scripts/calibrate_constants.py``; each value is the largest
measured ratio on that script's calibration grid.  Checks assert
``measured <= SLACK * constant`` on disjoint grids.
"""

SLACK = {slack!r}

# |P_4 - I_5(2A)| e^(-2A) / exp(-A d^2/(1+d^2)), grid {ps_grid}
PS_SCALING = {ps!r}

# |g_m1|/beta^4, |g_m2|/|g_m1|, |g_m3| pi^3/|eps|^3 over {g_len} (n, m, x) points, n in (100, 200, 400)
G1 = {g1!r}
G2 = {g2!r}
G3 = {g3!r}

# max log|P(q)| - log bound, grid {pq_grid}
PQ_LOG = {pq!r}

# max log|f_m| - log bound on the error arc, grid {away_grid}
AWAY_LOG = {away!r}

# |M / major-arc form - 1| sqrt(n) at n = 100, m = 1
M_CLOSED_FORM = {mcf!r}
'''


def log(msg):
    print(msg, file=sys.stderr, flush=True)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path(__file__).resolve().parents[1] / "src" / "etatheta" / "calibration.py")
    args = parser.parse_args(argv)

    t0 = time.time()
    ps = max(checks._ps_scaled_error(n, m) for n, m in checks.PS_CALIBRATION_GRID)
    log(f"P_4 scaling constant {ps:.6g} ({time.time() - t0:.1f}s)")

    g1, g2, g3 = checks._g_ratios(checks.G_CALIBRATION_GRID)
    log(f"g constants {g1:.6g} {g2:.6g} {g3:.6g} ({time.time() - t0:.1f}s)")

    pq = -math.inf
    for n, m in checks.PQ_CALIBRATION_GRID:
        beta = math.pi * math.sqrt(2 / n)
        xs = np.linspace(1.0, math.pi * m ** (1 / 3) / beta, 200)
        tau = beta * m ** (-1 / 3) * xs / (2 * math.pi) + 1j * beta / (2 * math.pi)
        logp = float(np.max(np.log(np.abs(checks.numeric.partition_function_value(tau)))))
        pq = max(pq, logp - asymptotics.p_q_bound(n, m, 1.0))
    log(f"P(q) log constant {pq:.6g}")

    spec = circle_method.QuadratureSpec(rtol=1e-8)
    away = -math.inf
    for n, m in checks.AWAY_CALIBRATION_GRID:
        beta = math.pi * math.sqrt(2 / n)
        c = m ** (-1 / 3)
        xs = np.linspace(1.0, math.pi / (beta * c), 40)
        fm = circle_method.fm_numeric_many(1j * beta * (1 + 1j * xs * c) / (2 * math.pi), m, spec)
        away = max(away, float(np.max(np.log(np.abs(fm)))) - asymptotics.f_away_bound(n, m))
    log(f"away log constant {away:.6g} ({time.time() - t0:.1f}s)")

    d = circle_method.wright_coefficient(1, 100, circle_method.QuadratureSpec(rtol=1e-7))
    mcf = checks.major_arc_deviation(d)
    log(f"major-arc constant {mcf:.6g} ({time.time() - t0:.1f}s)")

    text = TEMPLATE.format(
        slack=SLACK,
        ps=float(ps),
        ps_grid=checks.PS_CALIBRATION_GRID,
        g1=float(g1),
        g2=float(g2),
        g3=float(g3),
        g_len=len(checks.G_CALIBRATION_GRID),
        pq=float(pq),
        pq_grid=sorted(set(checks.PQ_CALIBRATION_GRID)),
        away=float(away),
        away_grid=sorted(set(checks.AWAY_CALIBRATION_GRID)),
        mcf=float(mcf),
    )
    args.out.write_text(text)
    log(f"wrote {args.out}")


if __name__ == "__main__":
    main()
