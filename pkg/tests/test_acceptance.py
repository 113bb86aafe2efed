"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Every criterion runs the corresponding named suite at its default budget and
the release tolerances baked into the suites (run with ``pytest -v -s`` to
watch the lines).
"""

import pytest

from valgeo.suites import RunConfig, SUITE_NAMES, run_suite

SEED = 1234


def _failures(report):
    return [r["name"] for r in report.records if not r["pass"]]


def _announce(num: int, label: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {num} [{status}] {label}{': ' + detail if detail else ''}")


@pytest.fixture(scope="module")
def reports():
    out = {}
    for name in SUITE_NAMES:
        out[name] = run_suite(name, RunConfig(seed=SEED))
    return out


def test_criterion_1_angle_laws(reports):
    rep = reports["angles"]
    ok = rep.passed and rep.wall_time_s < 10.0
    _announce(1, "angle symmetry laws and MC definition consistency", ok,
              f"wall={rep.wall_time_s:.1f}s failures={_failures(rep)}")
    assert rep.passed, _failures(rep)
    assert rep.wall_time_s < 10.0


def test_criterion_2_claim23_exact_identity(reports):
    rep = reports["claim23"]
    ok = rep.passed and rep.wall_time_s < 5.0
    _announce(2, "stacked-projection ball-volume identity at 1e-9", ok,
              f"wall={rep.wall_time_s:.1f}s failures={_failures(rep)}")
    assert rep.passed, _failures(rep)
    assert rep.wall_time_s < 5.0


def test_criterion_3_cauchy_kubota(reports):
    rep = reports["kubota"]
    ok = rep.passed and rep.wall_time_s < 120.0
    _announce(3, "Kubota estimator vs box and ball oracles at 2%", ok,
              f"wall={rep.wall_time_s:.1f}s failures={_failures(rep)}")
    assert rep.passed, _failures(rep)
    assert rep.wall_time_s < 120.0


def test_criterion_4_steiner_consistency(reports):
    rep = reports["steiner"]
    ok = rep.passed and rep.wall_time_s < 180.0
    _announce(4, "Steiner coefficients at 2% and exact segment-derivative law", ok,
              f"wall={rep.wall_time_s:.1f}s failures={_failures(rep)}")
    assert rep.passed, _failures(rep)
    assert rep.wall_time_s < 180.0


def test_criterion_5_product_formula(reports):
    rep = reports["hadwiger"]
    product_records = [r for r in rep.records if "product" in r["name"]]
    ok = bool(product_records) and all(r["pass"] for r in product_records)
    _announce(5, "two-factor product: exact coordinate case and rejection MC", ok,
              f"records={[r['name'] for r in product_records]}")
    assert ok, [r["name"] for r in product_records if not r["pass"]]


def test_criterion_6_lemma22_lemma24(reports):
    r22, r24 = reports["lemma22"], reports["lemma24"]
    total_wall = r22.wall_time_s + r24.wall_time_s
    ok = r22.passed and r24.passed and total_wall < 600.0
    _announce(6, "restricted-cosine and cosine-after-Radon proportionality <= 3%", ok,
              f"wall={total_wall:.1f}s failures={_failures(r22) + _failures(r24)}")
    assert r22.passed, _failures(r22)
    assert r24.passed, _failures(r24)
    assert total_wall < 600.0


def test_criterion_7_lefschetz_probe(reports):
    rep = reports["lefschetz"]
    ok = rep.passed
    _announce(7, "spectral probe: nonzero block scalars, leakage, quadrature oracles", ok,
              f"failures={_failures(rep)}")
    assert rep.passed, _failures(rep)


def test_criterion_8_algebra_shadows(reports):
    hd = [r for r in reports["hadwiger"].records if "V1^2" in r["name"]]
    lam = reports["lambda"]
    ok = all(r["pass"] for r in hd) and lam.passed
    _announce(8, "V1^2 vs V2 and degree-lowering proportionality <= 3%", ok,
              f"failures={[r['name'] for r in hd if not r['pass']] + _failures(lam)}")
    assert all(r["pass"] for r in hd), [r["name"] for r in hd if not r["pass"]]
    assert lam.passed, _failures(lam)


def test_criterion_9_reproducibility(reports):
    mismatched = []
    for name in SUITE_NAMES:
        again = run_suite(name, RunConfig(seed=SEED))
        if again.to_json() != reports[name].to_json():
            mismatched.append(name)
    ok = not mismatched
    _announce(9, "suite reruns with the same seed are bit-identical", ok,
              f"mismatched={mismatched}")
    assert not mismatched
