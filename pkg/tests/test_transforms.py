import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from martproj.grid import Path, Window, make_grid, restrict, window
from martproj.laws import Degenerate, Normal, Uniform
from martproj.streams import RandomSource
from martproj.transforms import (Composed, HorizontalStretch, Hold, Identity, InteriorBump,
                                 Multiplicative, Restriction, SineDemo, VerticalBump,
                                 builtin_transform, commutator_check, compose, compose_chain,
                                 holder_probe, invertibility_check, sup_distance,
                                 transform_from_dict)

G4 = make_grid([0, 1, 2, 3])
W02 = window(G4, 0, 2)
ZERO = Path(W02, [0.0, 0.0, 0.0])


def _random_path(rng, win):
    return Path(win, rng.normal(size=len(win)))


def test_identity_preserves_path():
    x = Path(W02, [1.5, -2.0, 3.25])
    assert Identity(W02).apply(x, 0) == x


def test_endpoint_projection_unit_factor():
    x = Path(W02, [1.0, 0.5, 2.0])
    tf = Multiplicative(W02, window(G4, 3, 3), Degenerate(1.0))
    y = tf.apply(x, 0)
    assert y.window.is_singleton and y.values.tolist() == [2.0]


def test_same_seed_bitwise_identical():
    x = Path(W02, [1.0, 0.5, 2.0])
    tf = VerticalBump(W02, Normal(0.0, 1.0))
    assert tf.apply(x, RandomSource(9)) == tf.apply(x, RandomSource(9))
    assert tf.apply(x, RandomSource(9)) != tf.apply(x, RandomSource(10))


def test_builtin_vertical_bump():
    y = builtin_transform("vertical_bump", W02, epsilon=Degenerate(1.0)).apply(ZERO, 0)
    assert y.values.tolist() == [0.0, 0.0, 1.0]


def test_builtin_stretch_appends_terminal():
    x = Path(W02, [1.0, 2.0, 5.0])
    y = builtin_transform("horizontal_stretch", W02, alpha=1.0).apply(x, 0)
    assert y.window == window(G4, 0, 3)
    assert y.values.tolist() == [1.0, 2.0, 5.0, 5.0]


def test_builtin_interior_bump():
    tf = builtin_transform({"kind": "interior_bump", "tau_star": 1.0,
                            "epsilon": {"family": "degenerate", "c": 2.0}}, W02)
    assert tf.apply(ZERO, 0).values.tolist() == [0.0, 2.0, 0.0]


def test_interior_bump_needs_interior_time():
    with pytest.raises(ValueError):
        InteriorBump(W02, Degenerate(1.0), tau_star=2.0)


def test_stretch_rejects_off_grid_end():
    with pytest.raises(ValueError, match="grid member"):
        HorizontalStretch(W02, alpha=0.5)


def test_builtin_rejects_unknown_kind():
    with pytest.raises(ValueError, match="unknown transform kind"):
        builtin_transform("rotate", W02)


def test_compose_with_identity_is_same():
    tf = VerticalBump(W02, Normal(0.0, 1.0))
    assert compose(Identity(W02), tf) is tf
    assert compose(tf, Identity(W02)) is tf
    x = Path(W02, [0.1, 0.2, 0.3])
    for seed in range(5):
        assert compose(Identity(W02), tf).apply(x, seed) == tf.apply(x, seed)


def test_compose_window_mismatch():
    with pytest.raises(ValueError, match="cannot compose"):
        compose(VerticalBump(W02, Degenerate(1.0)), HorizontalStretch(W02, alpha=1.0))


def test_two_fold_replay():
    # stretch after bump equals applying them in turn on substreams 0 and 1
    bump = VerticalBump(W02, Normal(0.0, 1.0))
    stretch = HorizontalStretch(W02, alpha=1.0)
    x = Path(W02, [0.3, -0.1, 0.7])
    src = RandomSource(4)
    seq = stretch.apply(bump.apply(x, src.child(0)), src.child(1))
    assert compose(stretch, bump).apply(x, src) == seq


def test_three_fold_chain_equals_nested():
    w = window(G4, 0, 3)
    a = VerticalBump(w, Normal(0.0, 1.0))
    b = InteriorBump(w, Uniform(-1.0, 1.0), tau_star=1.0)
    c = Multiplicative(w, w, Uniform(0.5, 1.5))
    x = Path(w, [1.0, 2.0, 3.0, 4.0])
    src = RandomSource(12)
    flat = compose_chain([a, b, c]).apply(x, src)
    assert flat == compose(c, compose(b, a)).apply(x, src)
    assert flat == compose(compose(c, b), a).apply(x, src)
    seq = c.apply(b.apply(a.apply(x, src.child(0)), src.child(1)), src.child(2))
    assert flat == seq


def test_sample_matches_apply_distributionally():
    w = window(G4, 0, 0)
    tf = Multiplicative(w, window(G4, 1, 1), Uniform(0.0, 1.0))
    out = tf.sample(Path(w, [2.0]), 0, 40000)[:, 0]
    assert out.mean() == pytest.approx(1.0, abs=4 * out.std() / 200)


def test_commutator_bump_vs_stretch():
    bump = VerticalBump(W02, Degenerate(1.0))
    stretch = HorizontalStretch(W02, alpha=1.0)
    rep = commutator_check(stretch, bump, ZERO, 0)   # left: bump first
    assert not rep.equal
    assert rep.left.values.tolist() == [0.0, 0.0, 1.0, 1.0]
    assert rep.right.values.tolist() == [0.0, 0.0, 0.0, 1.0]
    assert rep.first_diff_time == 2.0


def test_commutator_interior_bump_vs_stretch():
    ib = InteriorBump(W02, Normal(0.0, 1.0), tau_star=1.0)
    stretch = HorizontalStretch(W02, alpha=1.0)
    x = Path(W02, [0.4, -1.0, 2.0])
    for seed in range(10):
        rep = commutator_check(ib, stretch, x, seed)
        assert rep.equal and rep.first_diff_time is None


def test_commutator_identities():
    assert commutator_check(Identity(W02), Identity(W02), ZERO, 0).equal


def test_invertibility_shared_bump():
    # terminal value 0 keeps (0 + eps) - eps exact for any draw
    x = Path(W02, [0.4, -1.0, 0.0])
    up = VerticalBump(W02, Normal(0.0, 1.0), sign=1)
    down = VerticalBump(W02, Normal(0.0, 1.0), sign=-1)
    assert all(invertibility_check(up, down, x, s) for s in range(10))
    assert not invertibility_check(up, up, x, 0)


def test_invertibility_stretch_then_restrict():
    x = Path(W02, [0.4, -1.0, 2.0])
    st_ = HorizontalStretch(W02, alpha=1.0)
    assert invertibility_check(st_, Restriction(st_.target, W02), x, 0)


def test_invertibility_projection_loses_information():
    x = Path(W02, [0.4, -1.0, 2.0])
    proj = Hold(W02, window(G4, 2, 2))
    assert not invertibility_check(proj, Hold(window(G4, 2, 2), W02), x, 0)


def test_holder_identity_and_scaling():
    def pairs(rng):
        return _random_path(rng, W02), _random_path(rng, W02)

    rep = holder_probe(Identity(W02), pairs, 1.0, 50, 0)
    assert rep.K_hat == pytest.approx(1.0) and rep.skipped == 0
    scale = Multiplicative(W02, W02, Degenerate(2.5))
    assert holder_probe(scale, pairs, 1.0, 50, 0).K_hat == pytest.approx(2.5)
    bump = VerticalBump(W02, Normal(0.0, 1.0))
    rep = holder_probe(bump, pairs, 1.0, 50, 0, K=1.0 + 1e-12)
    assert rep.K_hat == pytest.approx(1.0) and rep.violations == 0


def test_sup_distance():
    a = Path(W02, [0.0, 1.0, 2.0])
    b = Path(W02, [0.0, -1.0, 2.5])
    assert sup_distance(a, b) == 2.0


def test_descriptor_roundtrip():
    w = window(G4, 0, 3)
    tfs = [VerticalBump(w, Normal(0.0, 1.0)), InteriorBump(w, Degenerate(2.0), tau_star=1.0),
           HorizontalStretch(W02, steps=1), Multiplicative(W02, window(G4, 3, 3), Uniform(0.2, 0.8)),
           Hold(W02, window(G4, 2, 3)), Restriction(w, W02)]
    x = Path(w, [1.0, 2.0, 3.0, 4.0])
    for tf in tfs:
        back = transform_from_dict(tf.to_dict())
        assert back.to_dict() == tf.to_dict()
        inp = x if tf.source == w else restrict(x, W02)
        assert back.apply(inp, 5) == tf.apply(inp, 5)
    chain = Composed([tfs[2], Multiplicative(w, w, Uniform(0.5, 1.5))])
    assert transform_from_dict(chain.to_dict()).apply(restrict(x, W02), 1) == \
        chain.apply(restrict(x, W02), 1)


def test_sine_demo_copies_before_pivot():
    import math
    from martproj.dynamics import gaussian_sine_path
    from martproj.grid import uniform_grid

    M = 30
    g = uniform_grid(0.0, 3 * math.pi, M)
    src_w = Window.from_indices(g, 0, 2 * M // 3 + 1)
    tgt_w = Window.from_indices(g, M // 3, M + 1)
    x = restrict(gaussian_sine_path(g, 1), src_w)
    tf = SineDemo(src_w, tgt_w, Degenerate(0.5))
    y = tf.apply(x, 2)
    pivot = src_w.t
    for t in tgt_w.times:
        if t < pivot:
            assert y.at(t) == x.at(t)
        else:
            assert y.at(t) >= x.terminal + math.sin(t) - 1e-15


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-100, 100, allow_nan=False), min_size=3, max_size=3),
       st.integers(0, 2**32))
def test_interior_bump_commutes_with_stretch_property(vals, seed):
    x = Path(W02, vals)
    ib = InteriorBump(W02, Normal(0.0, 3.0), tau_star=1.0)
    assert commutator_check(ib, HorizontalStretch(W02, alpha=1.0), x, seed).equal


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-100, 100, allow_nan=False), min_size=3, max_size=3),
       st.floats(0.01, 10))
def test_terminal_bump_never_commutes(vals, eps):
    x = Path(W02, vals)
    rep = commutator_check(HorizontalStretch(W02, alpha=1.0), VerticalBump(W02, Degenerate(eps)),
                           x, 0)
    assert not rep.equal
