"""Suite registry coverage and cross-suite smoke checks."""

import pytest

from liecartan.suites import REGISTRY, SuiteConfig, run_suite

EXPECTED_SUITES = {
    "forms-identities", "lie-checks", "kappa", "gauge-lemmas",
    "ym-el", "ym-maxwell", "ym-decomp",
    "kk-el", "kk-lc", "kk-curvature", "kk-decomp",
    "grav-el", "grav-decomp", "grav-bianchi", "grav-commutators",
    "grav-conservation", "constants",
}

QUICK = {
    "forms-identities": dict(cases=2, n=3),
    "lie-checks": dict(cases=2),
    "kappa": dict(cases=1),
    "gauge-lemmas": dict(cases=2),
    "ym-el": dict(cases=2, n=2),
    "ym-maxwell": dict(cases=2),
    "ym-decomp": dict(cases=2, n=2),
    "kk-el": dict(cases=2, n=2),
    "kk-lc": dict(cases=2, n=2),
    "kk-curvature": dict(cases=2, n=2),
    "kk-decomp": dict(cases=2, n=2),
    "grav-el": dict(cases=1),
    "grav-decomp": dict(cases=1),
    "grav-bianchi": dict(cases=1),
    "grav-commutators": dict(cases=1),
    "grav-conservation": dict(cases=1),
    "constants": dict(cases=5),
}


def test_registry_is_complete():
    assert set(REGISTRY) == EXPECTED_SUITES


@pytest.mark.parametrize("suite", sorted(EXPECTED_SUITES))
def test_every_suite_passes_on_rational_backend(suite):
    rep = run_suite(SuiteConfig(suite=suite, **QUICK[suite]))
    assert rep["pass"], rep
    assert rep["max_residual"] == 0 or rep["max_residual"] <= 1e-9


@pytest.mark.parametrize("suite", ["forms-identities", "gauge-lemmas",
                                   "ym-decomp", "kk-curvature", "grav-decomp"])
def test_float_backend_within_tolerance(suite):
    kwargs = dict(QUICK[suite])
    rep = run_suite(SuiteConfig(suite=suite, backend="float", tol=1e-9,
                                **kwargs))
    assert rep["pass"], rep


def test_cases_sorted_and_counted():
    rep = run_suite(SuiteConfig(suite="constants", cases=7))
    assert [c["id"] for c in rep["cases"]] == list(range(7))
    assert rep["config"]["cases"] == 7


def test_constants_report_notes_lambda():
    rep = run_suite(SuiteConfig(suite="constants", cases=1))
    assert "lambda" in rep["cases"][0]["note"]
    assert "= 6" in rep["cases"][0]["note"]
