import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from fhsopt.errors import FieldError, HypothesisError, VerificationError
from fhsopt.fmaps import (DifferenceBalancedFunction, LinearizedMap, PowerMap, TraceVectorMap,
                          dbf_create, dbf_zero_line, find_d_form_degree, frobenius_map,
                          is_permutation, linearized_eval, linearized_is_bijective,
                          map_from_spec, power_map_eval, tmap_apply, tmap_create,
                          verify_balanced, verify_difference_balanced)
from fhsopt.galois import GF, FieldElement, Tower

# -- linearized maps ---------------------------------------------------------------


def test_identity_linearized(gf9):
    phi = LinearizedMap(gf9, [1])
    assert list(phi.table) == list(range(9))
    assert phi.to_spec() == {"kind": "frobenius", "j": 0}


def test_golden_k2_linearized_map(gf81):
    phi = LinearizedMap(gf81, [-1, 1, 1])
    mod, p = gf81.modulus, 3
    for x in range(81):
        want = oracles.sub(oracles.add(oracles.power(x, 9, mod, p), oracles.power(x, 3, mod, p), 3, 4),
                           x, 3, 4)
        assert phi(x) == want
    assert linearized_is_bijective(phi) == (True, None)
    assert len(set(phi.table.tolist())) == 81
    assert phi.gcd_criterion() == (1,)
    assert phi.to_spec() == {"kind": "linearized", "P": [2, 1, 1]}
    assert linearized_eval(phi, gf81.zero) == gf81.zero


def test_non_bijective_linearized_witness(gf9):
    phi = LinearizedMap(gf9, [-1, 1], strict=False)
    ok, wit = phi.bijectivity()
    assert not ok and wit in (1, 2)
    assert phi(wit) == 0
    assert phi.gcd_criterion() == (2, 1)   # x - 1
    with pytest.raises(HypothesisError):
        LinearizedMap(gf9, [-1, 1])
    with pytest.raises(FieldError):
        LinearizedMap(gf9, [1, 2])


@pytest.mark.parametrize("p,m", [(3, 2), (3, 3), (5, 2), (3, 4), (7, 2)])
def test_gcd_criterion_agrees_with_distinct_count(p, m):
    F = GF(p, m)
    for deg in range(0, m + 2):
        for low in itertools.product(range(p), repeat=deg):
            phi = LinearizedMap(F, list(low) + [1], strict=False)
            bij = len(set(phi.table.tolist())) == F.q
            assert phi.bijectivity()[0] == bij
            assert (phi.gcd_criterion() == (1,)) == bij


@pytest.mark.parametrize("p,m", [(3, 2), (5, 3), (7, 3), (3, 5)])
def test_linearized_additive(p, m):
    F = GF(p, m)
    phi = LinearizedMap(F, [2, 0, 1] if p != 2 else [1], strict=False)
    xs = np.arange(F.q)
    a, b = np.meshgrid(xs, xs)
    assert np.array_equal(phi.table[F.add_vec(a, b)], F.add_vec(phi.table[a], phi.table[b]))


def test_frobenius_map(gf81):
    for j in range(5):
        fr = frobenius_map(gf81, j)
        assert all(fr(x) == gf81.pow(x, 3 ** (j % 4)) for x in range(81))


# -- power maps ------------------------------------------------------------------------

def test_power_maps(gf9):
    assert PowerMap(gf9, 1).is_permutation
    assert PowerMap(gf9, 3).is_permutation and is_permutation(3, gf9)
    sq = PowerMap(gf9, 2, strict=False)
    assert not sq.is_permutation and not is_permutation(2, gf9)
    assert sq(gf9.alpha) == sq(-gf9.alpha)
    with pytest.raises(HypothesisError):
        PowerMap(gf9, 2)
    for d in range(1, 20):
        pm = PowerMap(gf9, d, strict=False)
        assert pm.is_permutation == pm.is_bijective()
    assert power_map_eval(3, gf9.alpha) == gf9.alpha ** 3
    assert PowerMap(gf9, 0, strict=False)(0) == 1


# -- trace-vector maps -----------------------------------------------------------------

def test_tmap_examples():
    F = GF(5, 3, [1, 1, 0, 1], require_primitive=False)
    t = tmap_create(F, [1, F.root])
    assert t.rank == 2 and t.kernel_dim == 1
    assert tmap_apply(t, F.one) == (3, 0)
    assert t(0) == (0, 0)
    G = GF(7)
    assert TraceVectorMap(G, [1]).rank == 1
    rep = TraceVectorMap(F, [1, 1])
    assert rep.rank == 1 and rep.kernel_dim == 2
    full = TraceVectorMap(F, [1, F.root, F.root ** 2])
    assert full.rank == 3
    with pytest.raises(HypothesisError):
        TraceVectorMap(F, [0, 0])
    assert t.unpack(t.pack((3, 4))) == (3, 4)
    assert t.to_spec() == {"kind": "tmap", "w": [1, F.root.code]}


@given(st.sampled_from([(3, 2), (3, 3), (5, 2), (5, 3), (7, 2), (3, 5), (7, 3)]), st.data())
@settings(max_examples=60, deadline=None)
def test_tmap_rank_kernel_image(pm, data):
    p, m = pm
    F = GF(p, m)
    k = data.draw(st.integers(1, 4))
    w = data.draw(st.lists(st.integers(0, F.q - 1), min_size=k, max_size=k).filter(any))
    t = TraceVectorMap(F, w)
    assert p ** t.rank == oracles.span_size([F.coeffs(a) for a in w], p)
    assert len(t.image()) == p ** t.rank
    assert len(t.kernel()) == p ** (m - t.rank) == p ** t.kernel_dim
    # kernel basis spans the zero set and is trace-orthogonal to every a_i
    for z in t.kernel_basis:
        assert all(F.trace(F.mul(a, z)) == 0 for a in w)
    x, y = data.draw(st.integers(0, F.q - 1)), data.draw(st.integers(0, F.q - 1))
    c = data.draw(st.integers(0, p - 1))
    lhs = t(F.add(F.mul(c, x), y))
    assert lhs == tuple((c * a + b) % p for a, b in zip(t(x), t(y)))


def test_map_from_spec(gf81):
    assert map_from_spec(gf81, {"kind": "linearized", "P": [-1, 1, 1]}).P == (2, 1, 1)
    assert map_from_spec(gf81, {"kind": "frobenius", "j": 1})(gf81.alpha.code) == gf81.alpha_pow(3)
    assert map_from_spec(gf81, {"kind": "identity"})(5) == 5
    assert map_from_spec(gf81, {"kind": "power", "d": 7}).d == 7
    assert map_from_spec(gf81, {"kind": "tmap", "w": [1]}).rank == 1
    with pytest.raises(FieldError):
        map_from_spec(gf81, {"kind": "nope"})


# -- difference-balanced functions ---------------------------------------------------------

def _brute_db(table, top, base):
    """Oracle: count f(dx) - f(x) for every delta with plain loops."""
    q = base.q
    for d in range(2, top.q):
        counts = [0] * q
        for x in range(top.q):
            counts[base.sub(int(table[top.mul(d, x)]), int(table[x]))] += 1
        if len(set(counts)) != 1:
            return False
    return True


def test_trace_power_gf49(tower49):
    f = dbf_create({"kind": "trace_power", "d": 5}, tower49)
    assert f.d_form_degree == 5 and f.verified and f.checked_deltas == 47
    assert verify_balanced(f, tower49.top, tower49.base) == (True, [7] * 7)
    assert verify_difference_balanced(f, tower49.top) == (True, None, None)
    assert _brute_db(f.table, tower49.top, tower49.base)
    assert f(FieldElement(tower49.top, 1)) == FieldElement(tower49.base, 2)
    assert isinstance(f, DifferenceBalancedFunction) and f.domain is tower49.top


def test_trace_power_inverse_like(tower49):
    f = dbf_create({"kind": "trace_power", "d": 47}, tower49)
    assert f.verified


def test_lin_type():
    tw = Tower(GF(3, 3), 1)
    f = dbf_create({"kind": "lin_type", "l": 1}, tw)
    assert f.d_form_degree == 1
    F = tw.top
    for x in range(27):
        assert f(x) == F.trace(F.add(x, F.pow(x, 7)))
    assert _brute_db(f.table, F, tw.base)
    with pytest.raises(HypothesisError):
        dbf_create({"kind": "lin_type", "l": 2}, tw)
    with pytest.raises(HypothesisError):
        dbf_create({"kind": "lin_type"}, Tower(GF(3, 4), 1))
    with pytest.raises(HypothesisError):
        dbf_create({"kind": "lin_type"}, Tower(GF(5, 3), 1))


def test_balanced_examples(gf9):
    tw = Tower(gf9, 1)
    tr = gf9.trace_vec(np.arange(9))
    assert verify_balanced(tr, gf9, tw.base) == (True, [3, 3, 3])
    assert verify_balanced(np.zeros(9, dtype=int), gf9, tw.base) == (False, [9, 0, 0])
    assert verify_balanced(lambda x: gf9.trace(x), gf9, tw.base)[0]


def test_invalid_trace_square_records_delta(gf9):
    tw = Tower(gf9, 1)
    table = gf9.trace_vec(gf9.pow_vec(np.arange(9), 2))
    ok, delta, hist = verify_difference_balanced(table, gf9, tw.base)
    # frozen from the schoolbook oracle: first failing delta in dlog order is alpha
    assert (ok, delta, hist) == (False, 3, [1, 4, 4])
    with pytest.raises(HypothesisError):
        dbf_create({"kind": "trace_power", "d": 2}, tw)
    with pytest.raises(VerificationError) as err:
        dbf_create({"kind": "trace_power", "d": 2}, tw, check_params=False)
    assert err.value.delta == 3
    with pytest.raises(TypeError):
        verify_difference_balanced(table, gf9)


def test_linear_surjective_and_composite(tower49):
    f = dbf_create({"kind": "linear_surjective", "c": 3}, tower49)
    assert f.d_form_degree == 1
    with pytest.raises(HypothesisError):
        dbf_create({"kind": "linear_surjective", "c": 0}, tower49)
    comp = dbf_create({"kind": "composite", "inner": {"kind": "trace_power", "d": 5},
                       "post": {"kind": "linearized", "P": [3, 1]}}, tower49)
    assert comp.d_form_degree == 5
    assert np.array_equal(comp.table, tower49.base.mul_vec(4, dbf_create(
        {"kind": "trace_power", "d": 5}, tower49).table))
    pre = dbf_create({"kind": "composite", "inner": {"kind": "trace_power", "d": 5},
                      "pre": {"kind": "frobenius", "j": 1}}, tower49)
    assert pre.verified
    # Tr(x^5) followed by a non-injective codomain map is not balanced
    with pytest.raises(VerificationError):
        dbf_create({"kind": "composite", "inner": {"kind": "trace_power", "d": 5},
                    "post": {"kind": "power", "d": 2}}, tower49, check_params=False)


def test_rejected_kinds(tower49):
    with pytest.raises(HypothesisError, match="helleseth_gong"):
        dbf_create({"kind": "helleseth_gong"}, tower49)
    with pytest.raises(HypothesisError):
        dbf_create({"kind": "mystery"}, tower49)


def test_sampled_verification_flag(tower49):
    f = dbf_create({"kind": "trace_power", "d": 5}, tower49, cap=10, samples=20)
    assert not f.verified and f.checked_deltas == 20 and f.notes


@pytest.mark.parametrize("spec,tw", [
    ({"kind": "trace_power", "d": 5}, (7, 2, 1)),
    ({"kind": "trace_power", "d": 7}, (3, 4, 2)),
    ({"kind": "trace_power", "d": 11}, (5, 2, 1)),
    ({"kind": "linear_surjective"}, (3, 4, 2)),
    ({"kind": "lin_type"}, (3, 5, 1)),
])
def test_catalog_d_form_identity(spec, tw):
    p, m, k = tw
    tower = Tower(GF(p, m), k)
    f = dbf_create(spec, tower)
    top, base = tower.top, tower.base
    d = f.d_form_degree
    for y in range(1, base.q):
        ey = tower.embed(y)
        for x in range(top.q):
            assert f(top.mul(ey, x)) == base.mul(base.pow(y, d), f(x))
    assert find_d_form_degree(f.table, tower, [d]) == d


def test_zero_line_examples(tower49):
    f = dbf_create({"kind": "trace_power", "d": 5}, tower49)
    top, base = tower49.top, tower49.base
    theta = top.alpha.code
    a = dbf_zero_line(f, theta)
    zeros = {x for x in range(top.q) if f(top.mul(theta, x)) == f(x)}
    assert len(zeros) == 7 and 0 in zeros
    assert zeros == {top.mul(tower49.embed(c), a) for c in range(7)}
    with pytest.raises(HypothesisError):
        dbf_zero_line(f, 1)
    g = dbf_create({"kind": "lin_type"}, Tower(GF(3, 3), 1))
    with pytest.raises(HypothesisError):
        dbf_zero_line(g, 2)


def test_zero_line_every_delta():
    for p in (3, 5):
        tower = Tower(GF(p, 2), 1)
        top = tower.top
        base_codes = {tower.embed(c) for c in range(p)}
        for d in (x for x in range(1, p * p) if math.gcd(x, p * p - 1) == 1):
            f = dbf_create({"kind": "trace_power", "d": d}, tower)
            for delta in set(range(2, p * p)) - base_codes:
                a = dbf_zero_line(f, delta)
                zeros = {x for x in range(top.q) if f(top.mul(delta, x)) == f(x)}
                assert a in zeros and zeros == {top.mul(tower.embed(c), a) for c in range(p)}


def test_zero_line_rejects_non_dbf(tower49):
    top, base = tower49.top, tower49.base
    fake = DifferenceBalancedFunction(tower49, {"kind": "fake"},
                                      np.zeros(top.q, dtype=np.int64), 1, True)
    with pytest.raises(VerificationError):
        dbf_zero_line(fake, top.alpha.code)
