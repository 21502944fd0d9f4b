import numpy as np
import pytest
from hypothesis import given, strategies as st

from projkit.config import parse_key_values
from projkit.seqmodel import (
    BusbyExtension,
    ModelError,
    ModelInconsistency,
    SeqElement,
    SeqModel,
    SeqProjection,
    WitnessRejected,
    alpha_majorized,
    alpha_sandwich,
    alpha_spectra,
    alpha_state_limit,
    alpha_witness,
    amplify,
    approx_identity,
    closure,
    cone_regular_check,
    describe,
    eps_sequence,
    extrapolate_limit,
    formula_4_11,
    formula_4_9,
    is_closed,
    is_compact_in_model,
    join,
    k_regular_constant,
    norm_ap,
    quasi_regularity_constant,
    seq_angle,
    seq_norm_distance,
    zero_regular_check,
)


@pytest.fixture
def model():
    return SeqModel(fiber_dim=12, trunc_len=8)


def e1_projection(M, closed=True):
    e1 = M.vector(compact={0: 1})
    return SeqProjection.build(M, [e1] * M.trunc_len, e1 if closed else None, [M.vector("tail", compact={0: 1})])


def escaping(M, theta, closed):
    c, s = np.cos(theta), np.sin(theta)
    fibers = [M.vector(compact={0: c, M.escape_axis(n): s}) for n in range(1, M.trunc_len + 1)]
    tail = M.vector("tail", compact={0: c}, fresh={0: s})
    return SeqProjection.build(M, fibers, M.vector(compact={0: 1}) if closed else None, [tail])


def test_layout(model):
    M = model
    assert (M.op_dim, M.fiber_block, M.tail_block) == (12, 13, 15)
    assert M.fiber_dim_total == 13 and M.tail_dim == 15
    assert list(M.far_index("fiber")) == [12]
    assert list(M.fresh_index()) == [13, 14]
    assert M.escape_axis(1) == 11 and M.escape_axis(8) == 4
    S = M.weak_limit_map()
    assert S.shape == (13, 15) and np.allclose(S @ S.T, np.eye(13))


def test_layout_two_blocks():
    M = SeqModel(fiber_dim=3, trunc_len=2, blocks=2, n_far=1, n_fresh=1)
    assert list(M.compact_index("tail")) == [0, 1, 2, 5, 6, 7]
    v = M.vector("tail", compact={1: 1}, fresh={0: 2}, block=1)
    assert v[6] == 1 and v[9] == 2


@pytest.mark.parametrize(
    "kw",
    [
        dict(fiber_dim=0, trunc_len=4),
        dict(fiber_dim=4, trunc_len=4, tail_kind="sparse"),
        dict(fiber_dim=4, trunc_len=4, extension=BusbyExtension.from_t(2.0)),
        dict(fiber_dim=4, trunc_len=4, n_far=-1),
    ],
)
def test_model_rejects(kw):
    with pytest.raises(ModelError):
        SeqModel(**kw)


def test_budget(monkeypatch):
    monkeypatch.setenv("PROJKIT_BUDGET", "10")
    with pytest.raises(ModelError, match="budget"):
        SeqModel(fiber_dim=12, trunc_len=8)


def test_vector_errors(model):
    with pytest.raises(ModelError):
        model.vector("fiber", fresh={0: 1})
    with pytest.raises(ModelError):
        model.vector(compact={20: 1})
    with pytest.raises(ModelError):
        model.escape_axis(9)
    with pytest.raises(ModelError, match="collide"):
        SeqModel(fiber_dim=9, trunc_len=8).check_base_support(2)


def test_busby_extension():
    E = BusbyExtension.from_t(4.0).e_prime
    assert np.allclose(E @ E, E) and E[0, 0] == pytest.approx(0.25)
    with pytest.raises(ModelError):
        BusbyExtension.from_t(1.0)
    with pytest.raises(ModelError):
        BusbyExtension(np.eye(2) * 0.5)


def test_projection_validates(model):
    with pytest.raises(ModelError):
        SeqProjection.build(model, [model.vector(compact={0: 1})] * 3)
    with pytest.raises(ModelError):
        SeqProjection.build(model, [np.ones(5)] * model.trunc_len)
    with pytest.raises(ModelError):
        SeqProjection.build(model, [model.vector(compact={0: 1})] * model.trunc_len, scalar=1)
    z = SeqProjection.build(model, [np.zeros((13, 0))] * model.trunc_len)
    assert z.is_zero


def test_closure_and_compactness(model):
    p = e1_projection(model)
    assert is_closed(p) and is_compact_in_model(p)
    q = e1_projection(model, closed=False)
    assert not is_closed(q)
    assert is_closed(closure(q))
    assert is_compact_in_model(closure(q))
    r = escaping(model, 0.5, closed=True)
    assert is_closed(r) and not is_compact_in_model(r)


def test_total_closure_touches_only_used_blocks():
    M = SeqModel(fiber_dim=10, trunc_len=8, blocks=2)
    v = M.vector(compact={0: 1}, block=0)
    p = SeqProjection.build(M, [v] * 8, None, [M.vector("tail", compact={0: 1}, block=0)], total=True)
    inf = closure(p).infinity
    assert inf.shape[1] == M.fiber_block
    assert np.allclose(inf[M.fiber_block:], 0)


def test_alpha_compact_is_one(model):
    p = e1_projection(model)
    est = alpha_sandwich(p, witness=SeqElement.constant(model, np.diag(np.eye(12)[0])))
    assert est.lower == pytest.approx(1.0) and est.upper == pytest.approx(1.0)
    assert est.contains(1.0) and est.width == pytest.approx(0.0)
    rec = est.to_record()
    assert set(rec) == {"alpha_lower", "alpha_upper", "eps_sequence", "sources", "flags"}


@pytest.mark.parametrize("theta", [np.pi / 6, np.pi / 4, np.pi / 3])
def test_alpha_escaping_pinches(model, theta):
    s = 1 / np.cos(theta) ** 2
    for closed in (True, False):
        p = escaping(model, theta, closed)
        assert alpha_state_limit(p) == pytest.approx(s)
        a = SeqElement.constant(model, s * np.diag(np.eye(12)[0]))
        assert alpha_witness(p, a) == pytest.approx(s)
        est = alpha_sandwich(p, witness=a)
        assert est.contains(s, 1e-9) and est.width < 1e-9


def test_alpha_spectra_infinite_for_unit(model):
    I = np.eye(model.fiber_dim_total)
    p = SeqProjection.build(model, [I] * model.trunc_len, I, [np.eye(model.tail_dim)])
    est = alpha_spectra(p)
    assert np.isinf(est.lower) and est.lower_source == "eps-floor"
    assert est.contains(np.inf) and est.width == 0.0


def test_eps_sequence_and_approx_identity(model):
    p = escaping(model, np.pi / 4, False)
    i, eps = eps_sequence(p)
    assert len(i) == model.fiber_dim and np.all(np.diff(eps) >= -1e-12)
    assert eps[-1] == pytest.approx(0.5)
    with pytest.raises(ModelError):
        approx_identity(model, 13)


def test_witness_rejected(model):
    p = escaping(model, np.pi / 4, True)
    a = SeqElement.constant(model, np.diag(np.eye(12)[0]))
    with pytest.raises(WitnessRejected):
        alpha_witness(p, a)
    with pytest.raises(ModelError):
        alpha_witness(p, SeqElement.constant(model, np.triu(np.ones((12, 12)))))


def test_sandwich_inconsistency(model, monkeypatch):
    import projkit.seqmodel as sm

    p = escaping(model, np.pi / 3, True)
    assert not alpha_majorized(p, SeqElement.constant(model, np.eye(12) * 10))
    big = SeqElement.constant(model, 4 * np.diag(np.eye(12)[0]))
    assert alpha_sandwich(p, witness=big).contains(4.0, 1e-9)
    # a lower bound above the witness must be reported, not clipped
    monkeypatch.setattr(sm, "alpha_state_limit", lambda q: 100.0)
    with pytest.raises(ModelInconsistency):
        sm.alpha_sandwich(p, witness=big, use_spectra=False)


def test_extension_state_limit():
    t = 3.0
    M = SeqModel(fiber_dim=10, trunc_len=8, extension=BusbyExtension.from_t(t), blocks=2)
    I = np.zeros((M.fiber_dim_total, M.fiber_block))
    I[: M.fiber_block] = np.eye(M.fiber_block)
    p = SeqProjection.build(M, [I] * 8, I, [], scalar=1)
    assert alpha_state_limit(p) == pytest.approx(t)
    te = SeqElement.constant(M, np.zeros((20, 20)), scalar=t)
    assert alpha_witness(p, te) == pytest.approx(t)
    with pytest.raises(ModelError):
        alpha_spectra(p)


@given(x=st.floats(0.001, 0.999), y=st.floats(0.001, 0.999))
def test_extrapolation_recovers_power_law(x, y):
    limit = 0.2 + 0.7 * x
    p = 0.5 + 1.5 * y
    i = np.arange(1, 61, dtype=float)
    eps = limit - 0.1 / i**p
    ext = extrapolate_limit(i, eps)
    assert abs(ext.limit - limit) < 0.05


def test_extrapolation_flat_and_fallback():
    i = np.arange(1, 31)
    assert extrapolate_limit(i, np.full(30, 0.3)).method == "flat"
    noisy = 0.5 + 0.01 * (-1.0) ** i
    ext = extrapolate_limit(i, noisy)
    assert ext.method == "last+spread" and not ext.reliable


def test_join_and_geometry(model):
    p = escaping(model, np.pi / 3, False)
    theta = np.pi / 3
    c, s = np.cos(theta), np.sin(theta)
    w = [model.vector(compact={0: s, model.escape_axis(n): -c}) for n in range(1, 9)]
    q = SeqProjection.build(model, w, None, [model.vector("tail", compact={0: s}, fresh={0: -c})])
    j = join(p, q)
    assert all(V.shape[1] == 2 for V in j.fibers)
    assert np.isinf(alpha_state_limit(j))
    assert seq_norm_distance(p, p) == pytest.approx(0.0)
    assert seq_norm_distance(p, q) == pytest.approx(1.0)
    assert seq_angle(p, q) == pytest.approx(np.pi / 2)
    with pytest.raises(ModelError):
        join(p, e1_projection(SeqModel(fiber_dim=12, trunc_len=9)))


def test_amplify(model):
    p = escaping(model, 0.4, False)
    big = amplify(p, 3)
    assert big.model.blocks == 3
    assert big.fibers[0].shape == (3 * model.fiber_dim_total, 3)
    with pytest.raises(ModelError):
        amplify(p, 0)


def test_norm_ap(model):
    p = escaping(model, np.pi / 4, True)
    a = SeqElement.constant(model, np.diag(np.eye(12)[0]))
    assert norm_ap(p, a) == pytest.approx(1.0)
    assert norm_ap(escaping(model, np.pi / 4, False), a) == pytest.approx(np.cos(np.pi / 4))


def test_regularity_on_matrix_model(rng):
    M = SeqModel(fiber_dim=2, trunc_len=8, n_far=0, n_fresh=0)
    e = np.eye(2)
    p = SeqProjection.build(M, [e[:, n % 2] for n in range(8)], None, [e[:, 0], e[:, 1]])
    w = SeqElement.constant(M, np.array([[1, 1], [0, 0]], dtype=complex))
    res = quasi_regularity_constant(p, rng, samples=100, witnesses=[w], refine=False)
    assert res.constant == pytest.approx(np.sqrt(2))
    assert not zero_regular_check(p, rng).passed
    q = SeqProjection.build(M, [e[:, 0]] * 8, e[:, 0], [e[:, 0]])
    assert zero_regular_check(q, rng).passed
    assert cone_regular_check(q, rng, samples=50).passed
    assert quasi_regularity_constant(q, rng, samples=50, refine=False).constant == pytest.approx(1.0)
    assert k_regular_constant(q, 2, rng, samples=20, refine=False).constant == pytest.approx(1.0)


def test_formulas():
    assert formula_4_9(1.0) == pytest.approx(1.0)
    assert formula_4_11(2.0, 1.0) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        formula_4_9(1.5)
    with pytest.raises(ValueError):
        formula_4_11(2.0, 2.0)


def test_describe_is_key_value(model):
    text = describe(model, {"p": escaping(model, 0.3, True)})
    kv = parse_key_values(text)
    assert kv["fiber_dim"] == "12" and kv["trunc_len"] == "8" and "p.tail.0" in kv
    M = SeqModel(fiber_dim=4, trunc_len=2, extension=BusbyExtension.from_t(2.0), blocks=2)
    assert "extension.e_prime" in parse_key_values(describe(M))
