"""Acceptance criteria 1-11, one test each, with a PASS/FAIL summary line per criterion."""

import math
import time
from fractions import Fraction as F

import numpy as np
import pytest

from biriesz.experiments import run_named
from biriesz.indices import a_n, alpha, b_n, delta_region
from biriesz.oracles import bessel_j_quadrature
from biriesz.specfun import bessel_j


def record(log, number, title, passed, details, seconds):
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {title}  [{details}; {seconds:.1f} s]"
    log.append(line)
    print(line)


def describe(report):
    return "; ".join(f"{c.name}={c.measured!r} ({c.criterion})" for c in report.checks)


def run_and_record(log, number, title, runs, limit):
    start = time.perf_counter()
    reports = [run_named(name, overrides=overrides) for name, overrides in runs]
    elapsed = time.perf_counter() - start
    passed = all(r.passed for r in reports) and elapsed < limit
    record(log, number, title, passed, " | ".join(describe(r) for r in reports), elapsed)
    failed = [f"{c.name}: {c.measured!r} vs {c.criterion}" for r in reports for c in r.checks if not c.passed]
    assert not failed, failed
    assert elapsed < limit
    return reports


def test_criterion_01_bessel_fidelity(acceptance_log):
    start = time.perf_counter()
    worst = 0.0
    for nu in (0, 0.5, 1, 2.5, 5):
        for t in (0.1, 1, 10, 40, 120):
            worst = max(worst, abs(float(bessel_j(nu, t)) - bessel_j_quadrature(nu, t)))
    elapsed = time.perf_counter() - start
    passed = worst <= 1e-9 and elapsed < 5
    record(acceptance_log, 1, "special-function fidelity", passed, f"max abs error {worst:.2e} <= 1e-9", elapsed)
    assert worst <= 1e-9
    assert elapsed < 5


def test_criterion_02_engine_oracle(acceptance_log):
    run_and_record(acceptance_log, 2, "engine/oracle equivalence", [("engine-oracle", [])], 30)


def test_criterion_03_kernel_decay(acceptance_log):
    run_and_record(acceptance_log, 3, "kernel decay", [("kernel-decay", [])], 10)


def test_criterion_04_band_limitation(acceptance_log):
    run_and_record(acceptance_log, 4, "band-limitation", [("band-limit", [])], 60)


def test_criterion_05_sobolev_threshold(acceptance_log):
    run_and_record(acceptance_log, 5, "Sobolev threshold dichotomy", [("sobolev-threshold", [])], 60)


def test_criterion_06_221_dichotomy(acceptance_log):
    run_and_record(
        acceptance_log,
        6,
        "(2,2,1) dichotomy",
        [("l2l2l1-uniformity", []), ("delta-zero-blowup", [])],
        300,
    )


def test_criterion_07_dyadic_rates(acceptance_log):
    run_and_record(
        acceptance_log,
        7,
        "dyadic rate ceilings",
        [("dyadic-rate", ["triple=2,2,2", "n=2"]), ("dyadic-rate", ["triple=2,2,1", "n=1"])],
        600,
    )


def test_criterion_08_exponent_tables(acceptance_log):
    start = time.perf_counter()
    worked = [
        a_n(2) == F(3, 4),
        b_n(2) == F(11, 12),
        alpha(2, F(5, 4), F(5, 4)) == F(4, 3),
        delta_region(2, F(4, 3), math.inf) is False,
        delta_region(2, 1, math.inf) is True,
        delta_region(2, F(5, 4), 10) is True,
    ]
    report = run_named("threshold-table")
    elapsed = time.perf_counter() - start
    passed = all(worked) and report.passed and elapsed < 5
    record(acceptance_log, 8, "exponent tables", passed, f"worked values {sum(worked)}/6 | {describe(report)}", elapsed)
    assert all(worked)
    assert report.passed
    assert elapsed < 5


def test_criterion_09_net_packing(acceptance_log):
    run_and_record(acceptance_log, 9, "net packing", [("net-packing", ["trials=50"])], 10)


def test_criterion_10_tensorization(acceptance_log):
    run_and_record(acceptance_log, 10, "tensorization", [("tensorization", [])], 30)


DETERMINISM_RUNS = [
    ("engine-oracle", []),
    ("l2l2l1-uniformity", []),
    ("delta-zero-blowup", []),
    ("dyadic-rate", ["triple=2,2,2", "n=2"]),
    ("dyadic-rate", ["triple=2,2,1", "n=1"]),
]


def test_criterion_11_determinism(acceptance_log, tmp_path):
    start = time.perf_counter()
    mismatched = []
    compared = 0
    for k, (name, overrides) in enumerate(DETERMINISM_RUNS):
        dirs = [tmp_path / f"{k}-{rep}" for rep in range(2)]
        for d in dirs:
            run_named(name, overrides=overrides, out_dir=d)
        files = sorted(p.name for p in dirs[0].iterdir() if p.name != "manifest.json")
        assert files == sorted(p.name for p in dirs[1].iterdir() if p.name != "manifest.json")
        for fname in files:
            compared += 1
            if (dirs[0] / fname).read_bytes() != (dirs[1] / fname).read_bytes():
                mismatched.append(f"{name}/{fname}")
    elapsed = time.perf_counter() - start
    passed = not mismatched
    record(acceptance_log, 11, "determinism", passed, f"{compared} output files compared, {len(mismatched)} differ", elapsed)
    assert not mismatched, mismatched
