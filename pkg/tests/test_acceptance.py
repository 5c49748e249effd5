"""Acceptance suite: one test per criterion, driven by the shared battery.

Each test prints a single pass/fail line (visible with -s or in captured
output); the battery itself runs once per session at full scale with the
fixed seed 42.
"""

import json

import pytest

from multloc.battery import RULE_REFS, run_battery


@pytest.fixture(scope="module")
def battery():
    doc, timings = run_battery(seed=42, quick=False)
    return doc


def _criterion(battery_doc, k):
    crit = battery_doc["criteria"][k - 1]
    assert crit["criterion"] == k
    status = "PASS" if crit["pass"] else "FAIL"
    print(f"ACCEPTANCE {k:>2} [{RULE_REFS[k]}]: {status}")
    return crit


def test_criterion_01_mu_values(battery):
    crit = _criterion(battery, 1)
    assert crit["details"]["listed"] == [0, 1, 2, 4, 6]
    assert crit["details"]["closed_form_to_100"]
    assert crit["details"]["under_1ms"]
    assert crit["pass"]


def test_criterion_02_distinguishing_constructions(battery):
    crit = _criterion(battery, 2)
    assert crit["details"]["runs"] == 600
    assert crit["details"]["failures"] == []
    assert crit["details"]["under_5s"]
    assert crit["pass"]


def test_criterion_03_exact_height(battery):
    crit = _criterion(battery, 3)
    assert crit["details"]["failures"] == []
    assert crit["pass"]


def test_criterion_04_artinian_quadruple(battery):
    crit = _criterion(battery, 4)
    assert crit["details"]["failures"] == []
    assert crit["details"]["content_rejections"] == 4
    assert crit["details"]["under_2s"]
    assert crit["pass"]


def test_criterion_05_telescope_homology(battery):
    crit = _criterion(battery, 5)
    assert crit["details"]["failures"] == []
    assert crit["details"]["under_10s"]
    assert crit["pass"]


def test_criterion_06_delta_lambda_exactness(battery):
    crit = _criterion(battery, 6)
    assert crit["details"]["failures"] == []
    assert crit["pass"]


def test_criterion_07_weakly_cotorsion_decision(battery):
    crit = _criterion(battery, 7)
    assert crit["details"]["failures"] == []
    assert crit["pass"]


def test_criterion_08_projectivity_rule(battery):
    crit = _criterion(battery, 8)
    assert crit["details"]["mismatches"] == []
    assert crit["details"]["under_5s"]
    assert crit["pass"]


def test_criterion_09_certificate_calculus(battery):
    crit = _criterion(battery, 9)
    assert crit["details"]["failures"] == []
    assert crit["details"]["mutation_failures"] == []
    assert crit["pass"]


def test_criterion_10_orthogonality_soundness(battery):
    crit = _criterion(battery, 10)
    assert crit["details"]["runs"] == 200
    assert crit["details"]["failures"] == []
    assert crit["details"]["oracle_mismatches"] == []
    assert crit["pass"]


def test_criterion_11_determinism(battery):
    crit = _criterion(battery, 11)
    assert crit["details"]["identical"]
    assert crit["pass"]
    # the whole structured document is serializable and stable under key sort
    blob = json.dumps(battery, sort_keys=True)
    assert json.loads(blob) == battery


def test_all_pass_flag(battery):
    assert battery["all_pass"]
