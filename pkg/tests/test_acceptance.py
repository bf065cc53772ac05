"""Acceptance gate: one test per criterion, each delegating to the named
verification suite, printing one pass/fail line, and enforcing the stated
wall-time budget."""

import time

from relcore.verify import SUITES


def _run_criterion(number, suite_name, budget_seconds):
    start = time.perf_counter()
    report = SUITES[suite_name]()
    elapsed = time.perf_counter() - start
    for check in report.checks:
        print(f"criterion {number} [{suite_name}] {check.id}: {check.status} ({check.details})")
    status = report.overall.upper()
    print(f"criterion {number} [{suite_name}]: {status} in {elapsed:.2f}s (budget {budget_seconds}s)")
    assert report.overall == "pass", f"suite {suite_name} failed: " + "; ".join(
        f"{c.id}: {c.details}" for c in report.checks if c.status == "fail"
    )
    assert elapsed < budget_seconds, f"suite {suite_name} took {elapsed:.2f}s"


def test_criterion_01_hom_equivalence():
    _run_criterion(1, "hom-equivalence", 1.0)


def test_criterion_02_covering():
    _run_criterion(2, "covering", 5.0)


def test_criterion_03_johnson_core():
    _run_criterion(3, "johnson-core", 60.0)


def test_criterion_04_involution():
    _run_criterion(4, "involution", 60.0)


def test_criterion_05_spider():
    _run_criterion(5, "spider", 10.0)


def test_criterion_06_growth():
    _run_criterion(6, "growth", 300.0)


def test_criterion_07_order_classification():
    _run_criterion(7, "order-classification", 120.0)


def test_criterion_08_companions():
    _run_criterion(8, "companions", 120.0)


def test_criterion_09_core_engine():
    _run_criterion(9, "core-engine", 300.0)


def test_criterion_10_functoriality():
    _run_criterion(10, "functoriality", 60.0)
