import math
from dataclasses import replace

import numpy as np
import pytest

from rieszkit.cli import RunConfig, default_config
from rieszkit.grid import Field, GridSpec
from rieszkit.morrey import gaussian_bump, indicator_ball, power_weight, \
    random_bump, random_weight
from rieszkit.params import validate_params
from rieszkit.verify import (PASS, VIOLATION, WARN, check_a1_lift,
                             check_corollary2, check_duality_step,
                             check_fefferman_stein, check_inner_bound,
                             check_lemma4, check_lemma5, check_theorem1,
                             indicator_field, oracle_gate, run_suite)


@pytest.fixture(scope="module")
def spec1d():
    return GridSpec.centered(1, 128, 8.0)


@pytest.fixture(scope="module")
def params1d():
    return validate_params(1, 0.5, 2.0, 4.0)


@pytest.fixture(scope="module")
def zero1d(spec1d):
    return Field(spec1d, np.zeros(spec1d.shape))


def test_theorem1_zero_weight(spec1d, params1d, zero1d):
    f = gaussian_bump(spec1d, width=0.5)
    rep = check_theorem1(zero1d, f, params1d)
    assert rep.cases[0].lhs == 0.0
    assert rep.cases[0].ratio == 0.0
    assert not rep.cases[0].violation


def test_theorem1_source_scaling_invariance(spec1d, params1d):
    b = power_weight(0.15, 1.0, 1.0, spec1d)
    f = gaussian_bump(spec1d, width=0.5)
    r1 = check_theorem1(b, f, params1d).cases[0].ratio
    r2 = check_theorem1(b, Field(spec1d, 2.0 * f.values),
                        params1d).cases[0].ratio
    assert abs(r1 - r2) / r1 <= 1e-10


def test_theorem1_homogeneity_sanity(spec1d, params1d):
    b = random_weight(50, spec1d)
    f = random_bump(51, spec1d)
    rep = check_theorem1(b, f, params1d, sanity=True)
    assert rep.diagnostics["homogeneity_defect"] <= 1e-10


def test_lemma4_cases(spec1d, zero1d):
    rep = check_lemma4(zero1d, 1.5, 0.5, 4.0, A=0.0)
    assert rep.sup_ratio == 0.0
    b = power_weight(0.15, 1.0, 1.0, spec1d)
    rep = check_lemma4(b, 1.5, 0.5, 4.0, sanity=True)
    assert math.isfinite(rep.sup_ratio) and rep.sup_ratio > 0
    assert rep.diagnostics["homogeneity_defect"] <= 1e-10
    with pytest.raises(ValueError):
        check_lemma4(b, 1.0, 0.5, 4.0)


def test_lemma4_refinement_stable():
    sups = []
    for n in (128, 256):
        spec = GridSpec.centered(1, n, 8.0)
        b = power_weight(0.15, 1.0, 1.0, spec)
        sups.append(check_lemma4(b, 1.5, 0.5, 3.0).sup_ratio)
    assert abs(sups[1] - sups[0]) / sups[0] <= 0.10


def test_lemma5_flat_for_indicator_box():
    # the canonical flatness case: b = 1 on a compact interval,
    # p = 2, alpha = 0.25, rho sweep [1/8, 2]
    spec = GridSpec.centered(1, 256, 8.0)
    b = indicator_ball(spec, 1.0)
    rhos = list(np.geomspace(0.125, 2.0, 9))
    rep = check_lemma5(b, 2.0, 0.25, rhos)
    assert rep.diagnostics["flatness"] <= 3.0
    assert all(not c.violation for c in rep.cases)


def test_lemma5_zero_weight(spec1d, zero1d):
    rep = check_lemma5(zero1d, 2.0, 0.25, [0.5, 1.0], A=0.0)
    assert all(c.ratio == 0.0 for c in rep.cases)


def test_indicator_field_convention(spec1d):
    ind = indicator_field(spec1d, 0.5)
    r = spec1d.radii_from((0.0,))
    assert np.array_equal(ind.values, (r < 0.5).astype(float))


def test_inner_bound_homogeneity(spec1d, params1d):
    b = power_weight(0.15, 1.0, 1.0, spec1d)
    rep = check_inner_bound(b, params1d, sanity=True)
    assert rep.diagnostics["homogeneity_defect"] <= 1e-10
    assert math.isfinite(rep.sup_ratio)


def test_inner_bound_zero(spec1d, params1d, zero1d):
    rep = check_inner_bound(zero1d, params1d, A=0.0)
    assert rep.sup_ratio == 0.0


def test_duality_zero_source(spec1d, params1d, zero1d):
    b = power_weight(0.15, 1.0, 1.0, spec1d)
    rep = check_duality_step(b, zero1d, params1d)
    assert rep.cases[0].lhs == 0.0 and rep.cases[1].lhs == 0.0


def test_duality_pairing_and_holder(spec1d, params1d):
    b = power_weight(0.15, 1.0, 1.0, spec1d)
    for seed in (60, 61):
        f = random_bump(seed, spec1d)
        rep = check_duality_step(b, f, params1d)
        assert rep.diagnostics["pairing_defect"] <= 1e-10
        assert rep.diagnostics["holder_slack"] >= -1e-12


def test_a1_lift_check(spec1d, params1d):
    b = power_weight(0.15, 1.0, 1.0, spec1d)
    rep = check_a1_lift(b, params1d, sanity=True)
    assert math.isfinite(rep.sup_ratio)
    assert rep.diagnostics["lift_domination_min"] >= -1e-12
    assert math.isfinite(rep.diagnostics["a1_constant"])
    assert rep.diagnostics["homogeneity_defect"] <= 1e-10


def test_a1_lift_scaling_invariance():
    sups = []
    for n in (128, 256):
        spec = GridSpec.centered(1, n, 8.0)
        p = validate_params(1, 0.5, 2.0, 4.0)
        b = power_weight(0.125, 1.0, 1.0, spec)
        sups.append(check_a1_lift(b, p).sup_ratio)
    assert abs(sups[1] - sups[0]) / sups[0] <= 0.15


def test_fefferman_stein_constants_case(spec1d):
    # g = w = c on the whole grid: M c = c exactly (clipped volume), so
    # lhs = rhs and the ratio is exactly 1
    c = Field(spec1d, np.full(spec1d.shape, 1.5))
    rep = check_fefferman_stein(c, c, 4.0 / 3.0)
    assert rep.cases[0].ratio == pytest.approx(1.0, rel=1e-12)


def test_fefferman_stein_rejects_s_1(spec1d):
    c = Field(spec1d, np.ones(spec1d.shape))
    with pytest.raises(ValueError):
        check_fefferman_stein(c, c, 1.0)


def test_fefferman_stein_family_stable():
    sups = []
    for n in (128, 256):
        spec = GridSpec.centered(1, n, 8.0)
        w = power_weight(0.15, 1.0, 1.0, spec)
        vals = [check_fefferman_stein(random_bump(s, spec), w,
                                      4.0 / 3.0).sup_ratio
                for s in range(70, 75)]
        sups.append(max(vals))
    assert abs(sups[1] - sups[0]) / sups[0] <= 0.15


def test_corollary2_scaling_and_roundtrip(spec1d, params1d):
    b = power_weight(0.15, 1.0, 1.0, spec1d)
    u = gaussian_bump(spec1d, width=0.3)
    rep = check_corollary2(u, b, params1d, roundtrip=True, sanity=True)
    assert rep.diagnostics["homogeneity_defect"] <= 1e-10
    assert rep.diagnostics["roundtrip_residual"] <= 0.10
    assert math.isfinite(rep.sup_ratio)


def test_corollary2_gradient_variant_d2():
    spec = GridSpec.centered(2, 48, 4.0)
    params = validate_params(2, 1.0, 1.5, 2.0)
    b = power_weight(0.5, 1.0, 0.75, spec)
    from rieszkit.morrey import smooth_bump
    u = smooth_bump(spec, radius=1.2)
    rep = check_corollary2(u, b, params)
    descs = [c.descriptor for c in rep.cases]
    assert any("frac" in d for d in descs)
    assert any("grad" in d for d in descs)
    assert rep.diagnostics["frac_over_grad"] > 0


def test_sup_monotone_under_enlargement(spec1d, params1d):
    b = power_weight(0.15, 1.0, 1.0, spec1d)
    f1 = gaussian_bump(spec1d, width=0.5)
    f2 = random_bump(80, spec1d)
    r1 = check_theorem1(b, f1, params1d)
    r2 = check_theorem1(b, f2, params1d)
    merged = max(r1.sup_ratio, r2.sup_ratio)
    assert merged >= r1.sup_ratio and merged >= r2.sup_ratio


def test_oracle_gate_passes():
    gate = oracle_gate(d=1, n=64, n_seeds=2)
    assert gate["pass"]
    assert gate["riesz_fft_vs_bruteforce"] <= 1e-10
    assert gate["maximal_vs_bruteforce"] <= 1e-12


def _tiny_config(**kw):
    base = replace(default_config(1), n=64, refinements=2,
                   n_random_weights=2, n_random_sources=2,
                   spectral_random_count=1, duality_sources=1, gate_n=32)
    return replace(base, **kw)


def test_run_suite_empty_checks():
    suite = run_suite(_tiny_config(checks=(), oracle_gate=False))
    assert suite.reports == []
    assert not suite.has_violation


def test_run_suite_rejects_unknown_check():
    with pytest.raises(ValueError, match="unknown check"):
        run_suite(_tiny_config(checks=("nonsense",)))


def test_run_suite_rejects_negative_weight_scale():
    with pytest.raises(ValueError, match="weight_scale"):
        run_suite(_tiny_config(weight_scale=-1.0))


def test_run_suite_all_pass_and_deterministic():
    cfg = _tiny_config()
    s1 = run_suite(cfg)
    assert set(s1.verdicts.values()) == {PASS}
    s2 = run_suite(cfg)
    for r1, r2 in zip(s1.reports, s2.reports):
        assert r1.sup_ratio == r2.sup_ratio
        assert r1.refinement == r2.refinement
        for c1, c2 in zip(r1.cases, r2.cases):
            assert (c1.descriptor, c1.lhs, c1.rhs, c1.ratio) == \
                (c2.descriptor, c2.lhs, c2.rhs, c2.ratio)


def test_verdict_rules():
    from rieszkit.verify import CheckCase, RatioReport, _verdict
    rep = RatioReport(name="x", params={}, cases=[
        CheckCase("a", 1.0, 2.0, 0.5)], sup_ratio=0.5,
        refinement=[(0.1, 0.5), (0.05, 0.5)])
    assert _verdict(rep, 0.15, 3.0) == PASS
    rep.refinement = [(0.1, 0.5), (0.05, 1.0)]
    assert _verdict(rep, 0.15, 3.0) == WARN
    rep.refinement = [(0.1, 0.5), (0.05, 0.5)]
    rep.cases[0].violation = True
    assert _verdict(rep, 0.15, 3.0) == VIOLATION
