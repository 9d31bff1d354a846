import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from locder.algebra import Central, Element, Graded, SpecError, basis_window, bracket, resolve_spec
from locder.maps import (
    DerivationDescriptor,
    WindowedLinearMap,
    WindowError,
    ad_map,
    apply,
    combine,
    delta_t,
    leibniz_check,
    loop_derivation,
)
from locder.sampling import random_element, random_scalar
from locder.scalars import QSqrt2

W22 = resolve_spec("w22")
W22CL = resolve_spec("w22-centerless")
BMS3 = resolve_spec("bms3")
L = lambda m, c=1: Element({Graded(0, m): c})
J = lambda m, c=1: Element({Graded(1, m): c})
I2 = lambda m, c=1: Element({Graded(1, m): c})  # I in W(2,2)
I3 = lambda m, c=1: Element({Graded(2, m): c})  # I in bms3


class TestApply:
    def test_linearity(self):
        f = WindowedLinearMap(W22CL, 3, {Graded(0, 0): L(3)})
        assert apply(f, L(0, 2)) == L(3, 2)

    def test_zero_map(self):
        assert apply(WindowedLinearMap(W22CL, 2), L(1) + I2(-2)) == Element()

    def test_sum(self):
        f = WindowedLinearMap(W22CL, 2, {Graded(0, 1): I2(1), Graded(1, 1): Element()})
        assert apply(f, L(1) + I2(1)) == I2(1)

    def test_out_of_window(self):
        f = WindowedLinearMap(W22CL, 2)
        with pytest.raises(WindowError):
            apply(f, L(3))
        with pytest.raises(WindowError):
            WindowedLinearMap(W22CL, 2, {Graded(0, 5): L(0)})

    def test_centrals_always_in_domain(self):
        f = WindowedLinearMap(W22, 0)
        assert f.in_domain(Central(0)) and f.in_domain(Central(1))


class TestAdAndDelta:
    def test_ad_L0(self):
        ad = ad_map(L(0), W22CL, 4)
        for m in range(-4, 5):
            assert ad[Graded(0, m)] == L(m, -m)
            assert ad[Graded(1, m)] == I2(m, -m)

    def test_ad_I0(self):
        ad = ad_map(I2(0), W22CL, 4)
        for m in range(-4, 5):
            assert ad[Graded(0, m)] == I2(m, -m)

    def test_ad_kills_center(self):
        u = L(2) + I2(-1, 3)
        ad = ad_map(u, W22, 3)
        assert ad[Central(0)] == Element() and ad[Central(1)] == Element()

    def test_delta_t_w22(self):
        d = delta_t(W22, 6)
        assert d[Graded(1, 5)] == I2(5)
        assert d[Graded(0, 3)] == Element()
        assert d[Central(0)] == Element()
        assert d[Central(1)] == Element({Central(1): 1})

    def test_delta_t_bms3_normalization(self):
        # twice the classical one: J -> J/2, I -> I
        d = delta_t(BMS3, 6)
        half = QSqrt2(Fraction(1, 2))
        classical = {Graded(0, 4): Element(), Graded(1, 4): J(4, half), Graded(2, 4): I3(4)}
        for s, v in classical.items():
            assert d[s] == v * 2

    def test_loop_derivation(self):
        d2 = loop_derivation(BMS3, 2, 3)
        assert d2[Graded(1, 2)] == I3(2)
        assert d2[Graded(2, 2)] == Element()
        assert d2[Central(1)] == Element({Central(2): 1})
        assert loop_derivation(BMS3, 1, 3) == delta_t(BMS3, 3)


class TestCombine:
    def test_cancel(self):
        f = ad_map(L(1) + I2(2), W22CL, 4)
        assert combine([1, -1], [f, f]).is_zero()

    def test_normalize_L1(self):
        c1, d1 = QSqrt2(3, 1), QSqrt2(-2)
        g = combine([c1, d1], [ad_map(L(0), W22CL, 4), ad_map(I2(0), W22CL, 4)])
        assert g[Graded(0, 1)] == L(1) * -c1 + I2(1) * -d1

    def test_empty(self):
        z = combine([], [], spec=W22CL, window=3)
        assert z.is_zero() and z.window == 3
        with pytest.raises(ValueError):
            combine([], [])

    def test_window_min(self):
        assert combine([1, 1], [delta_t(W22, 5), delta_t(W22, 3)]).window == 3

    def test_spec_mismatch(self):
        with pytest.raises(SpecError):
            combine([1, 1], [delta_t(W22, 3), delta_t(BMS3, 3)])


class TestLeibniz:
    @pytest.mark.parametrize("name", ["witt", "virasoro", "w22", "w22-centerless", "bms3",
                                      "bms3-centerless", "n=4"])
    def test_delta_t_is_derivation(self, name):
        rep = leibniz_check(delta_t(resolve_spec(name), 6))
        assert rep.passed and rep.checked > 0 and rep.skipped > 0

    def test_pair_example(self):
        d = delta_t(W22, 5)
        lhs = apply(d, bracket(L(1), I2(2), W22))
        rhs = bracket(d[Graded(0, 1)], I2(2), W22) + bracket(L(1), d[Graded(1, 2)], W22)
        assert lhs == rhs == I2(3, -1)

    def test_flags_non_derivation(self):
        f = WindowedLinearMap(resolve_spec("witt"), 4, {Graded(0, 0): L(1)})
        rep = leibniz_check(f)
        assert not rep.passed
        pairs = {(v.x, v.y) for v in rep.violations}
        assert (Graded(0, 0), Graded(0, 2)) in pairs
        v = next(v for v in rep.violations if (v.x, v.y) == (Graded(0, 0), Graded(0, 2)))
        assert v.lhs == Element() and v.rhs == L(3, -1)

    def test_t2_dt_on_bms3(self):
        assert leibniz_check(loop_derivation(BMS3, 2, 5)).passed

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 10**6), st.sampled_from(["w22", "bms3-centerless", "n=4"]))
    def test_ad_is_derivation(self, seed, name):
        spec = resolve_spec(name)
        u = random_element(random.Random(seed), spec, 2, 30)
        assert leibniz_check(ad_map(u, spec, 4)).passed


class TestLinearity:
    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10**6))
    def test_ad_linear_in_u(self, seed):
        rng = random.Random(seed)
        u, v = random_element(rng, BMS3, 2, 30), random_element(rng, BMS3, 2, 30)
        a, b = random_scalar(rng, 30), random_scalar(rng, 30)
        lhs = ad_map(u * a + v * b, BMS3, 3)
        assert lhs == combine([a, b], [ad_map(u, BMS3, 3), ad_map(v, BMS3, 3)])

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10**6))
    def test_combine_pointwise(self, seed):
        rng = random.Random(seed)
        maps = [ad_map(random_element(rng, W22, 2, 30), W22, 3), delta_t(W22, 3)]
        cs = [random_scalar(rng, 30), random_scalar(rng, 30)]
        x = random_element(rng, W22, 3, 30)
        assert apply(combine(cs, maps), x) == apply(maps[0], x) * cs[0] + apply(maps[1], x) * cs[1]

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10**6))
    def test_kernel_free(self, seed):
        u = random_element(random.Random(seed), W22CL, 3, 30)
        if u:
            assert not ad_map(u, W22CL, 4).is_zero()


def test_descriptor_action_matches_map():
    rng = random.Random(5)
    d = DerivationDescriptor(random_element(rng, BMS3, 2, 10), QSqrt2(2, 1), (QSqrt2(3),))
    m = d.to_map(BMS3, 4)
    for s in basis_window(BMS3, 4):
        assert m[s] == d.action(Element({s: 1}), BMS3)
