"""Fusion math: worked examples, invariants, and oracle equivalence."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import reference
from stylefuse import fusion
from stylefuse.errors import EmptyAttributes, EmptyCandidates, EmptyOutfit, ZeroVector


def unit(values):
    return fusion.normalize(np.asarray(values, dtype=np.float64))


def random_unit(rng, dim):
    return fusion.normalize(rng.standard_normal(dim))


# --- normalize --------------------------------------------------------------

def test_normalize_three_four_five():
    assert np.allclose(fusion.normalize([3.0, 4.0]), [0.6, 0.8])


def test_normalize_zero_vector_rejected():
    with pytest.raises(ZeroVector):
        fusion.normalize([0.0] * 8)


def test_normalize_512_dim_unit_norm():
    rng = np.random.default_rng(7)
    v = fusion.normalize(rng.standard_normal(512))
    assert abs(reference.norm(list(v)) - 1.0) < 1e-6


def test_normalize_idempotent():
    rng = np.random.default_rng(8)
    v = fusion.normalize(rng.standard_normal(32))
    again = fusion.normalize(v)
    assert np.max(np.abs(again - v)) < 1e-12


def test_normalize_rejects_nan():
    with pytest.raises(ValueError):
        fusion.normalize([1.0, float("nan")])


# --- ta_isa -----------------------------------------------------------------

def test_ta_isa_single_item():
    rng = np.random.default_rng(1)
    v_t = random_unit(rng, 16)
    v_o = random_unit(rng, 16)
    weights, visual = fusion.ta_isa(v_t, [v_o], tau=0.01)
    assert weights.tolist() == [1.0]
    assert np.allclose(visual, v_o, atol=1e-12)


def test_ta_isa_softmax_weights_tau_half():
    # Orthogonal construction giving similarities (0.8, 0.4) exactly.
    v_t = unit([1.0, 0.0, 0.0])
    o1 = unit([0.8, 0.6, 0.0])
    o2 = unit([0.4, 0.0, math.sqrt(1 - 0.16)])
    weights, _ = fusion.ta_isa(v_t, [o1, o2], tau=0.5)
    expected = reference.softmax([0.8 / 0.5, 0.4 / 0.5])
    assert np.allclose(weights, expected, atol=1e-9)
    assert abs(weights[0] - 0.690) < 5e-4


def test_ta_isa_default_tau_sharpens():
    v_t = unit([1.0, 0.0, 0.0])
    o1 = unit([0.5, math.sqrt(0.75), 0.0])
    o2 = unit([0.4, 0.0, math.sqrt(1 - 0.16)])
    weights, _ = fusion.ta_isa(v_t, [o1, o2], tau=0.01)
    expected = reference.softmax([50.0, 40.0])
    assert np.allclose(weights, expected, atol=1e-9)
    assert weights[0] > 0.9999


def test_ta_isa_empty_outfit():
    with pytest.raises(EmptyOutfit):
        fusion.ta_isa(unit([1.0, 0.0]), [], tau=0.01)


def test_ta_isa_antipodal_cancellation():
    v_t = unit([0.0, 1.0])
    with pytest.raises(ZeroVector):
        fusion.ta_isa(v_t, [unit([1.0, 0.0]), unit([-1.0, 0.0])], tau=100.0)


@given(st.integers(min_value=1, max_value=64),
       st.sampled_from([1e-4, 0.01, 1.0, 100.0]),
       st.integers(min_value=0, max_value=2**31 - 1))
@settings(max_examples=60, deadline=None)
def test_ta_isa_weights_sum_to_one(n, tau, seed):
    rng = np.random.default_rng(seed)
    dim = 8
    v_t = random_unit(rng, dim)
    outfit = [random_unit(rng, dim) for _ in range(n)]
    weights, visual = fusion.ta_isa(v_t, outfit, tau=tau)
    assert abs(float(np.sum(weights)) - 1.0) < 1e-6
    assert abs(float(np.linalg.norm(visual)) - 1.0) < 1e-5


@given(st.integers(min_value=2, max_value=8),
       st.integers(min_value=0, max_value=2**31 - 1))
@settings(max_examples=40, deadline=None)
def test_ta_isa_permutation_equivariance(n, seed):
    rng = np.random.default_rng(seed)
    dim = 12
    v_t = random_unit(rng, dim)
    outfit = [random_unit(rng, dim) for _ in range(n)]
    weights, visual = fusion.ta_isa(v_t, outfit, tau=0.7)
    perm = rng.permutation(n)
    weights_p, visual_p = fusion.ta_isa(v_t, [outfit[i] for i in perm], tau=0.7)
    assert np.allclose(weights_p, weights[perm], atol=1e-6)
    assert np.max(np.abs(visual_p - visual)) < 1e-6


def test_ta_isa_high_temperature_near_uniform():
    rng = np.random.default_rng(42)
    dim = 16
    v_t = random_unit(rng, dim)
    outfit = [random_unit(rng, dim) for _ in range(5)]
    weights, _ = fusion.ta_isa(v_t, outfit, tau=100.0)
    assert float(np.max(np.abs(weights - 0.2))) < 1e-2


def test_ta_isa_low_temperature_near_one_hot():
    v_t = unit([1.0, 0.0, 0.0])
    o1 = unit([0.6, 0.8, 0.0])
    o2 = unit([0.5, 0.0, math.sqrt(0.75)])  # similarity gap 0.1
    weights, _ = fusion.ta_isa(v_t, [o1, o2], tau=1e-4)
    assert weights[0] >= 1.0 - 1e-6


# --- aa_va ------------------------------------------------------------------

def test_aa_va_single_attribute_returns_it():
    rng = np.random.default_rng(3)
    a1 = random_unit(rng, 8)
    scores, weights, aesthetic = fusion.aa_va(
        {"color": a1}, random_unit(rng, 8), random_unit(rng, 8)
    )
    assert weights == {"color": 1.0}
    assert np.max(np.abs(aesthetic - a1)) < 1e-9


def test_aa_va_equal_scores_uniform():
    # Symmetric attributes around the target axis give equal scores.
    v = unit([1.0, 0.0, 0.0])
    a1 = unit([0.5, 0.5, 0.0])
    a2 = unit([0.5, -0.5, 0.0])
    scores, weights, aesthetic = fusion.aa_va({"color": a1, "style": a2}, v, v)
    assert abs(scores["color"] - scores["style"]) < 1e-12
    assert abs(weights["color"] - 0.5) < 1e-9
    expected = fusion.normalize(np.asarray(a1) + np.asarray(a2))
    assert np.max(np.abs(aesthetic - expected)) < 1e-9


def test_aa_va_exp_weights_example():
    weights, _ = fusion.aggregate_attributes(
        {"color": unit([1.0, 0.0]), "style": unit([0.0, 1.0])},
        {"color": 0.6, "style": 0.2},
        sign=1,
    )
    raw = [math.exp(0.6), math.exp(0.2)]
    assert abs(raw[0] - 1.8221) < 1e-4
    assert abs(raw[1] - 1.2214) < 1e-4
    assert abs(weights["color"] - 0.5987) < 1e-4
    assert abs(weights["style"] - 0.4013) < 1e-4


def test_aa_va_sign_flip_reverses_ordering():
    attrs = {"color": unit([1.0, 0.0]), "style": unit([0.0, 1.0])}
    scores = {"color": 0.9, "style": 0.1}
    plus, _ = fusion.aggregate_attributes(attrs, scores, sign=1)
    minus, _ = fusion.aggregate_attributes(attrs, scores, sign=-1)
    assert plus["color"] > plus["style"]
    assert minus["color"] < minus["style"]


def test_aa_va_empty_attributes():
    v = unit([1.0, 0.0])
    with pytest.raises(EmptyAttributes):
        fusion.aa_va({}, v, v)


@given(st.floats(min_value=-5.0, max_value=5.0),
       st.integers(min_value=0, max_value=2**31 - 1))
@settings(max_examples=40, deadline=None)
def test_aa_va_score_shift_invariance(shift, seed):
    rng = np.random.default_rng(seed)
    attrs = {name: random_unit(rng, 10) for name in ("color", "style", "season")}
    scores = {name: float(rng.uniform(-1, 1)) for name in attrs}
    shifted = {name: s + shift for name, s in scores.items()}
    _, base = fusion.aggregate_attributes(attrs, scores)
    _, moved = fusion.aggregate_attributes(attrs, shifted)
    assert np.max(np.abs(base - moved)) < 1e-6


# --- entropy ----------------------------------------------------------------

def test_entropy_single_candidate():
    p, h = fusion.entropy_of_distribution([0.37])
    assert p.tolist() == [1.0]
    assert h == 0.0


def test_entropy_uniform_is_log_c():
    p, h = fusion.entropy_of_distribution([0.5, 0.5, 0.5, 0.5])
    assert np.allclose(p, 0.25)
    assert abs(h - math.log(4)) < 1e-12


def test_entropy_worked_example():
    p, h = fusion.entropy_of_distribution([1.0, 0.0])
    assert abs(p[0] - 0.7311) < 1e-4
    assert abs(p[1] - 0.2689) < 1e-4
    assert abs(h - 0.5822) < 1e-4


def test_entropy_empty_candidates():
    with pytest.raises(EmptyCandidates):
        fusion.entropy_of_distribution([])


@given(st.lists(st.floats(min_value=-30, max_value=30), min_size=1, max_size=24),
       )
@settings(max_examples=80, deadline=None)
def test_entropy_bounds(sims):
    p, h = fusion.entropy_of_distribution(sims)
    assert -1e-12 <= h <= math.log(len(sims)) + 1e-9
    assert abs(float(np.sum(p)) - 1.0) < 1e-9


def test_entropy_one_hot_limit():
    _, h = fusion.entropy_of_distribution([100.0, 0.0, 0.0])
    assert h < 1e-9


# --- de_gf ------------------------------------------------------------------

def test_de_gf_single_candidate_uniform_gates():
    rng = np.random.default_rng(5)
    cues = fusion.CueSet(
        text=random_unit(rng, 8),
        visual=random_unit(rng, 8),
        aesthetic=random_unit(rng, 8),
    )
    result = fusion.de_gf(cues, [random_unit(rng, 8)])
    gates = list(result.diagnostics.gates.values())
    assert all(abs(g - 1.0 / 3.0) < 1e-9 for g in gates)
    assert all(h == 0.0 for h in result.diagnostics.cue_entropies.values())
    mean = fusion.normalize(
        (np.asarray(cues.visual) + np.asarray(cues.text) + np.asarray(cues.aesthetic)) / 3
    )
    assert np.max(np.abs(result.q - mean)) < 1e-9


def test_de_gf_worked_gate_example():
    # Candidates and cues engineered to reproduce similarity profiles
    # (1, 0) for cue A and (0.5, 0.5) for cue B.
    c1 = unit([1.0, 0.0, 0.0])
    c2 = unit([0.0, 1.0, 0.0])
    cue_a = c1
    cue_b = unit([0.5, 0.5, math.sqrt(0.5)])
    cues = fusion.CueSet(text=cue_b, visual=cue_a)
    result = fusion.de_gf(cues, [c1, c2])
    gates = result.diagnostics.gates
    assert abs(result.diagnostics.cue_entropies["visual"] - 0.5822) < 1e-4
    assert abs(result.diagnostics.cue_entropies["text"] - math.log(2)) < 1e-12
    assert abs(gates["visual"] - 0.5277) < 1e-4
    assert abs(gates["text"] - 0.4723) < 1e-4


def test_de_gf_identical_cues_return_that_vector():
    rng = np.random.default_rng(6)
    v = random_unit(rng, 16)
    cues = fusion.CueSet(text=v, visual=v.copy(), aesthetic=v.copy())
    cands = [random_unit(rng, 16) for _ in range(4)]
    result = fusion.de_gf(cues, cands)
    assert np.max(np.abs(result.q - v)) < 1e-9


def test_de_gf_empty_candidates():
    rng = np.random.default_rng(9)
    cues = fusion.CueSet(text=random_unit(rng, 4))
    with pytest.raises(EmptyCandidates):
        fusion.de_gf(cues, [])


def test_de_gf_gate_rescale_invariance():
    # Rebuilding the fused sum from raw exp(-H) gates (any uniform positive
    # rescale of the normalized ones) renormalizes to the same q.
    rng = np.random.default_rng(10)
    cues = fusion.CueSet(
        text=random_unit(rng, 12), visual=random_unit(rng, 12),
        aesthetic=random_unit(rng, 12),
    )
    cands = [random_unit(rng, 12) for _ in range(5)]
    result = fusion.de_gf(cues, cands)
    for scale in (1e-6, 3.7, 1e6):
        fused = np.zeros(12)
        for name, vec in cues.present():
            fused += scale * result.diagnostics.gates[name] * vec
        assert np.max(np.abs(fusion.normalize(fused) - result.q)) < 1e-9


# --- build_query ------------------------------------------------------------

def test_build_query_collapses_when_everything_identical():
    rng = np.random.default_rng(11)
    v = random_unit(rng, 8)
    result = fusion.build_query([v], v, None, [v])
    assert np.max(np.abs(result.q - v)) < 1e-9


def test_build_query_svaf_disabled_returns_target_text():
    rng = np.random.default_rng(12)
    v_t = random_unit(rng, 8)
    outfit = [random_unit(rng, 8) for _ in range(3)]
    cands = [random_unit(rng, 8) for _ in range(4)]
    result = fusion.build_query(
        outfit, v_t, None, cands, fusion.FusionConfig(svaf_enabled=False)
    )
    assert np.array_equal(result.q, fusion.normalize(v_t))
    assert result.diagnostics.gates == {}
    assert result.diagnostics.saliency_weights == []


def test_build_query_matches_reference_once():
    rng = np.random.default_rng(13)
    dim = 16
    outfit = [random_unit(rng, dim) for _ in range(3)]
    v_t = random_unit(rng, dim)
    attrs = {name: random_unit(rng, dim) for name in ("color", "style", "season")}
    cands = [random_unit(rng, dim) for _ in range(5)]
    result = fusion.build_query(outfit, v_t, attrs, cands)
    expected, diag = reference.build_query(
        [list(map(float, o)) for o in outfit],
        list(map(float, v_t)),
        {k: list(map(float, v)) for k, v in attrs.items()},
        [list(map(float, c)) for c in cands],
    )
    assert reference.rel_error(list(result.q), expected) < 1e-10
    for name, gate in diag["gates"].items():
        assert abs(result.diagnostics.gates[name] - gate) < 1e-10


# --- cross-cutting properties ----------------------------------------------

@given(st.integers(min_value=0, max_value=2**31 - 1))
@settings(max_examples=60, deadline=None)
def test_query_vector_invariants_fuzz(seed):
    rng = np.random.default_rng(seed)
    dim = int(rng.choice([4, 8, 16]))
    n = int(rng.integers(1, 6))
    m = int(rng.integers(0, 6))
    c = int(rng.integers(1, 6))
    outfit = [random_unit(rng, dim) for _ in range(n)]
    v_t = random_unit(rng, dim)
    names = ["color", "style", "occasion", "season", "material", "balance"][:m]
    attrs = {name: random_unit(rng, dim) for name in names} or None
    cands = [random_unit(rng, dim) for _ in range(c)]
    result = fusion.build_query(outfit, v_t, attrs, cands)
    diag = result.diagnostics
    assert abs(float(np.linalg.norm(result.q)) - 1.0) < 1e-5
    assert abs(sum(diag.saliency_weights) - 1.0) < 1e-6
    assert abs(sum(diag.gates.values()) - 1.0) < 1e-6
    assert all(h >= 0.0 for h in diag.cue_entropies.values())
    if attrs:
        assert abs(sum(diag.attribute_weights.values()) - 1.0) < 1e-6
