import itertools

import pytest
from hypothesis import given, settings, strategies as st

from groupapprox import groups as G_

Z = G_.FreeAbelian(1)
Z2 = G_.FreeAbelian(2)
H3 = G_.Heisenberg(1)

# ball cardinalities computed independently of the BFS (closed forms for the
# abelian cases, a direct normal-form count for Heisenberg)
HEIS_BALL = [1, 5, 17, 53, 135, 299, 593, 1069, 1793, 2845, 4309]


def test_ball_sizes_Z():
    for n in range(0, 30):
        assert G_.growth(Z, n) == 2 * n + 1


def test_ball_sizes_Z2():
    for n in range(0, 12):
        assert G_.growth(Z2, n) == 2 * n * n + 2 * n + 1


def test_ball_sizes_heisenberg():
    for n, want in enumerate(HEIS_BALL):
        assert G_.growth(H3, n) == want


def test_ball_order_and_lengths():
    B = G_.ball(Z, 3)
    assert B.elements[0] == (0,)
    lens = [B.length(p) for p in B.elements]
    assert lens == sorted(lens)
    assert set(B.elements) == {(k,) for k in range(-3, 4)}
    assert (2,) in B and (4,) not in B
    assert B.index((0,)) == 0


def test_ball_cap():
    with pytest.raises(G_.BallCapExceeded):
        G_.ball(Z2, 40, cap=100)


def _elems(G, r):
    return list(G_.ball(G, r).elements)


@st.composite
def heis_elements(draw):
    pool = _elems(H3, 3)
    return draw(st.sampled_from(pool))


@settings(max_examples=80, deadline=None)
@given(heis_elements(), heis_elements(), heis_elements())
def test_heisenberg_group_laws(a, b, c):
    assert H3.mul(H3.mul(a, b), c) == H3.mul(a, H3.mul(b, c))
    assert H3.mul(a, H3.inv(a)) == H3.identity()
    assert H3.mul(H3.identity(), a) == a


@settings(max_examples=60, deadline=None)
@given(st.tuples(st.integers(-9, 9), st.integers(-9, 9)),
       st.tuples(st.integers(-9, 9), st.integers(-9, 9)))
def test_free_abelian_laws(a, b):
    assert Z2.mul(a, b) == Z2.mul(b, a)
    assert Z2.mul(a, Z2.inv(a)) == Z2.identity()


def test_wreath_product_laws():
    W = G_.WreathProduct(G_.FiniteCyclic(2), G_.FiniteCyclic(3))
    elems = _elems(W, 3)
    for a, b, c in itertools.islice(itertools.product(elems, repeat=3), 400):
        assert W.mul(W.mul(a, b), c) == W.mul(a, W.mul(b, c))
    for a in elems:
        assert W.mul(a, W.inv(a)) == W.identity()


def test_direct_product_ball():
    D = G_.DirectProduct(Z, Z)
    assert G_.growth(D, 2) == G_.growth(Z2, 2)


def test_parse_group_round_trip():
    for text in ("Z", "Z^2", "Z^3", "F2", "Heisenberg(1)", "Z/7", "Sym(4)"):
        G = G_.parse_group(text)
        again = G_.group_from_descriptor(G.descriptor())
        assert again.descriptor() == G.descriptor()


def test_parse_group_rejects_junk():
    with pytest.raises(ValueError):
        G_.parse_group("Klein bottle")


# ---------------------------------------------------------------------------
# quotient descriptors

@settings(max_examples=120, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.integers(0, 4),
       st.tuples(st.integers(-6, 6), st.integers(-6, 6)))
def test_lattice_membership_matches_span(a, c, b, v):
    L = G_.LatticeHNF(Z2, [(a, b % c if c else 0), (0, c)])
    span = {(al * a, al * (b % c) + be * c)
            for al in range(-10, 11) for be in range(-10, 11)}
    assert L.kernel_contains(v) == (v in span)


@settings(max_examples=120, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 3),
       st.tuples(st.integers(-8, 8), st.integers(-8, 8)),
       st.tuples(st.integers(-8, 8), st.integers(-8, 8)))
def test_lattice_map_is_canonical_hom(a, c, b, v, w):
    L = G_.LatticeHNF(Z2, [(a, b % c), (0, c)])
    rv = L.map(v)
    assert 0 <= rv[0] < a and 0 <= rv[1] < c
    assert L.kernel_contains((v[0] - rv[0], v[1] - rv[1]))
    # homomorphism into the residue set
    assert L.map(tuple(x + y for x, y in zip(v, w))) == \
        L.quotient_mul(L.map(v), L.map(w))


def test_hnf_normalizes_row_span():
    rows = G_.hnf([(2, 4), (1, 3)])
    assert rows == ((1, 1), (0, 2))
    L = G_.LatticeHNF(Z2, [(2, 4), (1, 3)])
    assert L.index == 2
    assert L.kernel_contains((1, 3)) and L.kernel_contains((2, 4))


def test_hnf_rejects_singular():
    with pytest.raises(ValueError):
        G_.hnf([(1, 2), (2, 4)])


def test_lattice_residues_count():
    L = G_.LatticeHNF(Z2, [(3, 1), (0, 4)])
    rs = L.residues()
    assert len(rs) == L.index == 12
    assert len(set(rs)) == 12


def test_congruence_mod_heisenberg():
    Q = G_.CongruenceMod(H3, 3)
    assert Q.index == 27
    e = H3.identity()
    for p in G_.ball(H3, 4):
        img = Q.map(p)
        assert Q.kernel_contains(p) == (img == Q.identity_residue())
    # kernel contains the cube of a generator
    x = ((1,), (0,), 0)
    x3 = H3.mul(x, H3.mul(x, x))
    assert Q.kernel_contains(x3)
    assert not Q.kernel_contains(x)


def test_congruence_quotient_is_hom():
    Q = G_.CongruenceMod(H3, 2)
    B = G_.ball(H3, 2)
    for a in B:
        for b in B:
            assert Q.map(H3.mul(a, b)) == Q.quotient_mul(Q.map(a), Q.map(b))


# ---------------------------------------------------------------------------
# subgroups and distortion

def test_index_subgroup_of_Z_decompose():
    data = G_.index_subgroup_of_Z(3)
    for k in range(-10, 11):
        i, h = data.decompose((k,))
        assert data.parent.mul(data.reps[i], data.embed(h)) == (k,)
        assert 0 <= i < 3


def test_distortion_undistorted_cases():
    assert G_.distortion(G_.embedding_mZ_in_Z(2), 6) == 6
    assert G_.distortion(G_.embedding_axis_in_Z2(), 5) == 5


def test_center_distortion_heisenberg():
    pair = G_.embedding_center_heisenberg()
    # quadratic distortion: the center element of height c has word length
    # about 4*sqrt(c), so intrinsic length c overtakes the ambient radius
    assert G_.distortion(pair, 8) == 8
    assert G_.distortion(pair, 18) == 20
    assert G_.distortion(pair, 20) == 25
    first = next(n for n in range(1, 25)
                 if G_.distortion(pair, n) > n)
    assert first == 18
