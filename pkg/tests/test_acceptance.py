"""Acceptance criteria 1-10.

Each test records one PASS/FAIL line per criterion into ``acceptance_log``;
the lines are printed in the terminal summary.  A test asserts its criterion
exactly as stated.  ``companion`` tests check a closely related statement that
isolates the part of a criterion which fails.
"""

import json
import time

import pytest

from etatheta import checks, cli
from etatheta.fourier_extract import CoeffTable


def record(log, k, results, elapsed=None, limit=None):
    ok = all(r.passed for r in results)
    if limit is not None:
        ok = ok and elapsed < limit
    status = "PASS" if ok else "FAIL"
    timing = f" ({elapsed:.1f} s, limit {limit:g} s)" if limit is not None else ""
    log.setdefault(k, []).append(f"criterion {k}: {status}{timing}")
    log[k].extend("    " + r.line() for r in results)
    return ok


def record_companion(log, k, results):
    log.setdefault(k, []).extend("    " + r.line() for r in results)
    return all(r.passed for r in results)


def timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t0


def run_cli(*argv):
    code = cli.main([str(a) for a in argv])
    assert code == 0


# ---------------------------------------------------------------------------


def test_criterion_1_exact_oracles(acceptance_log):
    res, dt = timed(checks.exact_oracles)
    assert record(acceptance_log, 1, res, dt, 10.0)


def test_criterion_2_table_invariants(acceptance_log):
    res, dt = timed(checks.table_invariants, 200, 60)
    assert record(acceptance_log, 2, res, dt, 60.0)


def test_criterion_3_principal_value(acceptance_log):
    res, dt = timed(checks.principal_value, "average")
    assert record(acceptance_log, 3, res, dt, 120.0)


@pytest.fixture(scope="module")
def residue_results():
    return checks.residue_identity()


def test_criterion_4_residue_identity(acceptance_log, residue_results):
    assert record(acceptance_log, 4, residue_results[:1])


def test_criterion_4_companion_one_sided(acceptance_log, residue_results):
    assert record_companion(acceptance_log, 4, residue_results[1:])


def test_criterion_5_special_functions(acceptance_log):
    res = []
    for suite in (checks.euler_integrals, checks.sech_expansion, checks.bessel_series, checks.bessel_main_term, checks.ps_scaling):
        res.extend(suite())
    assert record(acceptance_log, 5, res)


def test_criterion_6_near_pole(acceptance_log):
    res = checks.dominant_pole("displayed") + checks.g_bounds()
    assert record(acceptance_log, 6, res)


def test_criterion_6_companion_dominant_pole(acceptance_log):
    # second-order term and phase kept: holds on the full grid
    res = checks.dominant_pole("geometric")
    # real-part correction with its phase restored: holds where the second-order term is below the scale
    low = tuple((z, e) for z, e in checks.DOMINANT_GRID if z < 1 / 3)
    res += checks.dominant_pole("complex", grid=low)
    assert record_companion(acceptance_log, 6, res)


def _cli_table(tmp_path, prescription):
    out = tmp_path / f"table-{prescription}.json"
    t0 = time.perf_counter()
    run_cli(
        "exact-table", "--n-max", 2000, "--m-max", 40, "--precision", "extended", "--prescription", prescription,
        "--format", "json", "--out", out, "--cache-dir", tmp_path / "cache", "--quiet",
    )
    table = CoeffTable.from_json(json.loads(out.read_text()))
    return table, time.perf_counter() - t0


@pytest.mark.slow
def test_criterion_7_theorem_band(acceptance_log, tmp_path):
    t0 = time.perf_counter()
    table, _ = _cli_table(tmp_path, "average")
    res = checks.theorem1("average", table)
    assert record(acceptance_log, 7, res, time.perf_counter() - t0, 900.0)


@pytest.mark.slow
def test_criterion_7_companion_below(acceptance_log, tmp_path):
    table, _ = _cli_table(tmp_path, "below")
    assert record_companion(acceptance_log, 7, checks.theorem1("below", table))


@pytest.fixture(scope="module")
def wright_results():
    return {p: checks.wright(p) for p in ("average", "below")}


@pytest.mark.slow
def test_criterion_8_wright(acceptance_log, wright_results):
    assert record(acceptance_log, 8, wright_results["average"])


@pytest.mark.slow
def test_criterion_8_companion_below(acceptance_log, wright_results):
    total, _, major = wright_results["below"]
    assert record_companion(acceptance_log, 8, [total, major])


@pytest.mark.slow
def test_criterion_8_companion_decay(acceptance_log, wright_results):
    res = [checks.em_decay_companion(wright_results[p][1]) for p in ("average", "below")]
    assert record_companion(acceptance_log, 8, res)


def test_criterion_9_fixed_z(acceptance_log):
    assert record(acceptance_log, 9, checks.fixed_z(corrected=False))


def test_criterion_9_companion_corrected(acceptance_log):
    assert record_companion(acceptance_log, 9, checks.fixed_z(corrected=True))


def test_criterion_10_determinism(acceptance_log, tmp_path):
    def run(name, threads, cache):
        out = tmp_path / name
        run_cli("exact-table", "--n-max", 300, "--m-max", 30, "--threads", threads, "--cache-dir", tmp_path / cache,
                "--out", out, "--quiet")
        return out.read_bytes()

    first = run("a.csv", 1, "c1")
    again = run("b.csv", 1, "c1")  # cache hit
    fresh = run("c.csv", 1, "c2")  # recomputed
    threaded = run("d.csv", 2, "c3")
    same = first == again == fresh == threaded
    res = [checks.CheckResult("exact-table output byte-identical (cache, recompute, threads 1 vs 2)", same,
                              0.0 if same else 1.0, 0.0, f"{len(first)} bytes")]
    assert record(acceptance_log, 10, res)
