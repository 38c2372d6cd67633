"""Frozen constants for the bounded-by-constant checks.

Generated by ``scripts/calibrate_constants.py``; each value is the largest
measured ratio on that script's calibration grid.  Checks assert
``measured <= SLACK * constant`` on disjoint grids.
"""

SLACK = 2.0

# |P_4 - I_5(2A)| e^(-2A) / exp(-A d^2/(1+d^2)), grid ((200, 2), (600, 4), (1600, 4))
PS_SCALING = 0.007002711622446595

# |g_m1|/beta^4, |g_m2|/|g_m1|, |g_m3| pi^3/|eps|^3 over 18 (n, m, x) points, n in (100, 200, 400)
G1 = 4.170702962576056e+33
G2 = 0.19992064774709362
G3 = 3.5605116692076655e+33

# max log|P(q)| - log bound, grid [(100, 1), (100, 2), (100, 5), (400, 1), (400, 2), (400, 5), (1600, 1), (1600, 2), (1600, 5)]
PQ_LOG = -0.7539331915797662

# max log|f_m| - log bound on the error arc, grid [(100, 1), (100, 2), (100, 3), (200, 1), (200, 2), (200, 3)]
AWAY_LOG = -10.917519539703395

# |M / major-arc form - 1| sqrt(n) at n = 100, m = 1
M_CLOSED_FORM = 10.90418241248897
