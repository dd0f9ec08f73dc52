import math
import random
from fractions import Fraction

import pytest

from groupapprox import groups as G_
from groupapprox import targets as T_
from groupapprox import certify as C_
from groupapprox import construct as X_
from groupapprox import profiles as P_

Z = G_.FreeAbelian(1)
Z2 = G_.FreeAbelian(2)


# ---------------------------------------------------------------------------
# cyclic and quotient builders

def test_cyclic_dimensions():
    for n in (1, 2, 5, 12):
        c = X_.cyclic_Z(n)
        assert c.dimension == 2 * n + 1
        assert c.family == "sofic" and c.n == n
    with pytest.raises(X_.BuildError):
        X_.cyclic_Z(0)


def test_exact_finite_regular():
    C6 = G_.FiniteCyclic(6)
    c = X_.exact_finite(C6, 4)
    assert c.dimension == 6
    assert C_.verify_D(c).passed
    fin = X_.exact_finite(C6, 2, family="fin")
    assert fin.fin_group is not None
    assert C_.verify_D(fin).passed


def test_from_quotient_skew_lattice():
    L = G_.LatticeHNF(Z2, [(1, 2), (0, 5)])
    c = X_.from_quotient(Z2, L, 1)
    assert c.dimension == 5
    assert C_.verify_D(c).passed


def test_from_quotient_kernel_guard():
    L = G_.LatticeHNF(Z2, [(1, 2), (0, 5)])
    # (1,2) is a kernel element of word length 3, inside B(4)
    with pytest.raises(X_.BuildError, match="kernel meets"):
        X_.from_quotient(Z2, L, 2)


def test_from_quotient_families():
    L = G_.LatticeHNF(Z, [(7,)])
    for family in ("sofic", "hyp", "lin", "fin"):
        c = X_.from_quotient(Z, L, 1, family)
        assert c.dimension == 7
        assert C_.verify_D(c).passed, family
    assert X_.from_quotient(Z, L, 1, "lin").epsilon == Fraction(1, 4)
    assert X_.from_quotient(Z, L, 1, "fin").fin_group is not None


def test_from_quotient_heisenberg_congruence():
    H = G_.Heisenberg(1)
    Q = G_.CongruenceMod(H, 3)
    c = X_.from_quotient(H, Q, 1)
    assert c.dimension == 27
    assert C_.verify_D(c).passed


# ---------------------------------------------------------------------------
# Folner witnesses

def test_interval_witness_defect():
    w = P_.interval_witness_Z(2)
    assert len(w.members) == 24
    assert w.defect == Fraction(1, 2) and w.valid
    assert not w.controlled_ok()
    wc = P_.interval_witness_Z(2, controlled=True)
    assert wc.controlled_ok()


def test_folner_to_sofic():
    w = P_.interval_witness_Z(2)
    c = X_.folner_to_sofic(w)
    assert c.n == 1 and c.dimension == 24
    assert C_.verify_D(c).passed


def test_folner_to_sofic_rejects_weak_witness():
    w = X_.FolnerWitness(Z, 1, [(i,) for i in range(6)])
    with pytest.raises(X_.BuildError, match="defect"):
        X_.folner_to_sofic(w, n=1)


def test_witness_round_trip():
    w = P_.interval_witness_Z(2, controlled=True)
    back = X_.witness_from_json(w.to_json())
    assert back.members == w.members
    assert back.defect == w.defect
    assert back.radius_bound == w.radius_bound


# ---------------------------------------------------------------------------
# finite-index induction

def test_induced_certificate_verifies():
    data = G_.index_subgroup_of_Z(2)
    c_H = X_.cyclic_Z(6)
    for n in (1, 2, 3):
        c = X_.induce_finite_index(Z, data, c_H, n=n)
        assert c.dimension == 2 * c_H.dimension
        assert C_.verify_D(c).passed


def test_cocycle_identities():
    data = G_.index_subgroup_of_Z(3)
    rng = random.Random(7)
    B = list(G_.ball(Z, 6))
    for _ in range(300):
        g = B[rng.randrange(len(B))]
        k = B[rng.randrange(len(B))]
        a_g, h_g = X_.induction_data(data, g)
        a_k, h_k = X_.induction_data(data, k)
        a_gk, h_gk = X_.induction_data(data, Z.mul(g, k))
        for i in range(data.index):
            assert a_gk[i] == a_g[a_k[i]]
            assert h_gk[i] == data.sub.mul(h_g[a_k[i]], h_k[i])


# ---------------------------------------------------------------------------
# products and conversions

def test_direct_product_dimensions():
    c = X_.direct_product(X_.cyclic_Z(3), X_.cyclic_Z(3))
    assert c.dimension == 49
    assert c.group.descriptor()["kind"] == "DirectProduct"
    assert C_.verify_D(c).passed


def test_direct_product_family_guard():
    hyp = X_.perm_to_hyp(X_.cyclic_Z(2), 1)
    with pytest.raises(X_.BuildError, match="family"):
        X_.direct_product(X_.cyclic_Z(2), hyp)


def test_perm_to_hyp_separation():
    c = X_.perm_to_hyp(X_.cyclic_Z(8), 2)
    rep = C_.verify_D(c)
    assert rep.passed
    assert abs(rep.separation - math.sqrt(2)) < 1e-9
    with pytest.raises(X_.BuildError, match="radius"):
        X_.perm_to_hyp(X_.cyclic_Z(3), 2)


def test_perm_to_lin():
    c = X_.perm_to_lin(X_.cyclic_Z(3), T_.FieldFp(2))
    assert c.epsilon == Fraction(1, 4)
    assert c.dimension == 7
    assert C_.verify_D(c).passed
    with pytest.raises(X_.BuildError):
        X_.perm_to_lin(c)  # already lin


# ---------------------------------------------------------------------------
# projective amplification

def test_amplification_exponent():
    ell, delta = X_.amplification_exponent(8)
    assert ell == 22
    assert 0 < delta < 1
    assert (5 / 4) ** -ell <= delta
    assert (5 / 4) ** -(ell - 1) > delta


def test_amplify_guards():
    hyp = X_.perm_to_hyp(X_.cyclic_Z(8), 2)
    with pytest.raises(X_.BuildError, match="n >= 8"):
        X_.amplify_projective(hyp, 2)
    with pytest.raises(X_.BuildError, match="radius"):
        X_.amplify_projective(hyp, 8)
    with pytest.raises(X_.BuildError, match="hyperlinear"):
        X_.amplify_projective(X_.cyclic_Z(8), 8)


def test_amplify_full_instance():
    L = G_.LatticeHNF(Z, [(641,)])
    hyp = X_.from_quotient(Z, L, 320, "hyp")
    cert = X_.amplify_projective(hyp, 8)
    assert cert.family == "hyp-projective"
    rep = C_.verify_D(cert)
    assert rep.passed
    first = cert.target(Z.identity())
    assert isinstance(first, T_.ImplicitTensorUnitary)
    assert first.power == 22


# ---------------------------------------------------------------------------
# wreath products

def test_wreath_by_rf():
    base = X_.exact_finite(G_.FiniteCyclic(2), 5, family="fin")
    quot = G_.LatticeHNF(Z, [(5,)])
    cert = X_.wreath_by_rf(base, Z, 1, quot)
    assert cert.fin_group.order == 160
    assert cert.dimension == 160
    assert C_.verify_D(cert).passed


def test_wreath_by_rf_kernel_guard():
    base = X_.exact_finite(G_.FiniteCyclic(2), 5, family="fin")
    quot = G_.LatticeHNF(Z, [(3,)])  # 3 inside B(4)
    with pytest.raises(X_.BuildError, match="kernel meets"):
        X_.wreath_by_rf(base, Z, 1, quot)


def test_wreath_sofic_bullets():
    c_G = X_.cyclic_Z(1)
    c_H = X_.exact_finite(G_.FiniteCyclic(2), 1)
    cert, report = X_.wreath_sofic(c_G, c_H, 1)
    assert cert.dimension == 18
    assert C_.verify_D(cert).passed
    assert report["shift_identity_exact"]
    assert report["split_identity_exact"]
    assert report["final_defect"] <= report["final_defect_bound"]
    assert report["multiplicativity_ok"] and report["injectivity_ok"]
    assert report["pass"]


def test_wreath_sofic_requires_regular_top():
    c_G = X_.cyclic_Z(1)
    c_H = X_.cyclic_Z(1)  # Z top is not finite
    with pytest.raises(X_.BuildError, match="finite top"):
        X_.wreath_sofic(c_G, c_H, 1)


# ---------------------------------------------------------------------------
# extension by an amenable quotient

def test_extend_by_amenable_small():
    split = X_.coordinate_split(2, [0])
    w = P_.interval_witness_Z(10, controlled=True)
    c_N = X_.cyclic_Z(20 * w.radius_bound)
    cert = X_.extend_by_amenable(c_N, w, split, 1)
    assert cert.family == "sofic"
    assert C_.verify_D(cert).passed
    first = cert.target(Z2.identity())
    assert isinstance(first, T_.PermWreathElement)
    assert first.size == len(w.members)


def test_extend_by_amenable_guards():
    split = X_.coordinate_split(2, [0])
    w_uncontrolled = P_.interval_witness_Z(10)
    c_N = X_.cyclic_Z(100)
    with pytest.raises(X_.BuildError, match="controlled"):
        X_.extend_by_amenable(c_N, w_uncontrolled, split, 1)
    w_small = P_.interval_witness_Z(2, controlled=True)
    with pytest.raises(X_.BuildError, match="10n"):
        X_.extend_by_amenable(c_N, w_small, split, 1)
