from itertools import combinations, permutations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mcbrot.algebra import Multicomplex
from mcbrot.dynamics import EscapeParams, escape_counts_idempotent, member_idempotent
from mcbrot.equivalence import (
    AIRBROT,
    OCTAHEDRON,
    MarginalOctahedron,
    Representative,
    apply_phi,
    build_phi,
    canonical_representative,
    compose_phi,
    conjugacy_residual,
    enumerate_classes,
    fit_affine,
    inverse_phi,
    marginal_affine,
    octahedron_check,
    octahedron_radius,
    signature,
)
from mcbrot.literal import parse_literal
from mcbrot.slices import CaseLabel, UnitTriple, all_triples, predicted_basis
from mcbrot.voxel import SliceSpec, sample_slice


def T(text, n=3):
    return UnitTriple.parse(text, n)


class TestSignature:
    def test_examples(self):
        s = signature(T("1,i1,i2"), 2)
        assert (s.p_parity, s.contains_one, s.square_signs) == ("even", True, (-1, -1, 1))
        s = signature(T("i1,i2,i1i2"), 2)
        assert (s.contains_one, s.closed, s.square_signs) == (False, True, (-1, -1, 1))
        s = signature(OCTAHEDRON, 2)
        assert (s.contains_one, s.closed, s.square_signs) == (False, False, (1, 1, 1))
        assert s.marginal

    def test_odd_reduces_to_squares(self):
        assert signature(T("i1,i2,i1i2"), 3) == signature(T("i1,i2,i1i3"), 3)
        assert signature(T("1,i1i2,i1i3"), 3) == signature(T("i1i2,i1i3,i2i3"), 3)

    @given(st.sampled_from(all_triples(4)), st.permutations(range(3)), st.sampled_from([2, 3]))
    def test_permutation_invariant(self, t, perm, p):
        shuffled = UnitTriple(t.n, tuple(t.units[i] for i in perm))
        assert signature(shuffled, p) == signature(t, p)


class TestPhi:
    def test_case1_formula(self):
        m = build_phi(T("1,i1,i2"), T("1,i1,i3"), 2)
        assert m is not None and m.case is CaseLabel.CASE1
        eta = parse_literal("1 + 2*i1 + 3*i2 + 4*i1i2", 3)
        assert apply_phi(m, eta) == parse_literal("1 + 2*i1 + 3*i3 + 4*i1i3", 3)

    def test_identity(self):
        m = build_phi(T("i1,i2,i3"), T("i1,i2,i3"), 3)
        assert m.is_identity
        eta = parse_literal("0.5*i1 - i2 + 2*i1i2i3", 3)
        assert apply_phi(m, eta) == eta
        assert conjugacy_residual(m, 3) == 0.0

    def test_not_equivalent(self):
        assert build_phi(T("1,i1,i2"), T("i1,i2,i3"), 2) is None
        assert build_phi(T("i1,i2,i3"), T("i1,i2,i1i2"), 3) is None

    def test_three_factor_unit_is_imaginary(self):
        # i1i2i3 squares to -1, so it may stand in for i3 at odd p
        m = build_phi(T("i1,i2,i3"), T("i1,i2,i1i2i3"), 3)
        assert m is not None and conjugacy_residual(m, 3, 100) <= 1e-10

    def test_case3_example(self):
        m = build_phi(T("1,i1,i2"), T("i1i2,i1,i2"), 3)
        assert m is not None and m.case is CaseLabel.CASE3
        assert conjugacy_residual(m, 3, 100) <= 1e-10

    def test_paired_squares_match(self):
        for t1, t2 in combinations(all_triples(3), 2):
            m = build_phi(t1, t2, 2)
            if m is not None:
                assert all((bin(s).count("1") - bin(d).count("1")) % 2 == 0 for s, d, _ in m.pairing)
                assert sorted(s for s, _, _ in m.pairing) == sorted(predicted_basis(t1, 2))
                assert sorted(d for _, d, _ in m.pairing) == sorted(predicted_basis(t2, 2))

    def test_apply_rejects_outside_subspace(self):
        m = build_phi(T("1,i1,i2"), T("1,i1,i3"), 2)
        with pytest.raises(ValueError):
            apply_phi(m, parse_literal("i3", 3))

    def test_linear(self, rng):
        m = build_phi(T("i1,i2,i1i3"), T("i2,i3,i1i2"), 2)
        basis = predicted_basis(m.source, 2)
        for _ in range(20):
            eta = Multicomplex.from_terms(3, dict(zip(basis, rng.normal(size=len(basis)))))
            zeta = Multicomplex.from_terms(3, dict(zip(basis, rng.normal(size=len(basis)))))
            a, b = rng.normal(size=2)
            lhs = apply_phi(m, eta * a + zeta * b)
            rhs = apply_phi(m, eta) * a + apply_phi(m, zeta) * b
            assert lhs.allclose(rhs, 1e-12)

    def test_inverse(self, rng):
        m = build_phi(T("1,i1,i1i2"), T("1,i2,i1i2"), 2)
        inv = inverse_phi(m)
        eta = Multicomplex.from_terms(3, dict(zip(predicted_basis(m.source, 2), rng.normal(size=4))))
        assert apply_phi(inv, apply_phi(m, eta)).allclose(eta, 1e-15)

    def test_cross_order(self):
        m = build_phi(T("i2,i4,i2i4", 4), T("i1,i2,i1i2"), 2)
        assert m is not None
        assert conjugacy_residual(m, 2) <= 1e-10


class TestEquivalenceLaws:
    @pytest.mark.parametrize("p", [2, 3])
    def test_reflexive(self, p):
        for t in all_triples(4):
            m = build_phi(t, t, p)
            assert m is not None and m.is_identity

    @pytest.mark.parametrize("p", [2, 3])
    def test_symmetric(self, p):
        for t1, t2 in combinations(all_triples(3), 2):
            assert (build_phi(t1, t2, p) is None) == (build_phi(t2, t1, p) is None)

    @pytest.mark.parametrize("p", [2, 3])
    def test_success_iff_same_signature(self, p):
        for t1, t2 in combinations(all_triples(3), 2):
            same = signature(t1, p) == signature(t2, p)
            assert (build_phi(t1, t2, p) is not None) == same

    @pytest.mark.parametrize("p", [2, 3])
    def test_composition(self, p):
        triples = all_triples(3)
        for t1, t2, t3 in combinations(triples[:24], 3):
            a, b = build_phi(t1, t2, p), build_phi(t2, t3, p)
            if a is not None and b is not None:
                c = compose_phi(a, b)
                assert c.source == t1 and c.target == t3
                assert conjugacy_residual(c, p, 20) <= 1e-10

    @pytest.mark.parametrize("p", [2, 3])
    def test_canonical_maps_conjugate(self, p):
        for t in all_triples(4):
            rep = canonical_representative(t, p)
            assert conjugacy_residual(rep.phi, p, 100) <= 1e-10

    @pytest.mark.parametrize("p", [2, 3])
    def test_membership_transport(self, p, rng):
        triples = all_triples(3)
        params = EscapeParams(300)
        for t in triples[::5]:
            rep = canonical_representative(t, p)
            c = np.zeros((400, 8))
            c[:, list(t.units)] = rng.uniform(-1.2, 1.2, (400, 3))
            mapped = np.stack([apply_phi(rep.phi, Multicomplex(3, row)).coeffs for row in c])
            a = escape_counts_idempotent(c, 3, p, 300)
            b = escape_counts_idempotent(mapped, 3, p, 300)
            keep = ~(((a == 0) | (a > 150)) & ((b == 0) | (b > 150)))
            assert np.array_equal(a[keep] == 0, b[keep] == 0)
        c = parse_literal("-1 + 0.1*i1i2", 3)
        rep = canonical_representative(T("1,i1i2,i2i3"), 2)
        assert member_idempotent(c, 2, params).status == member_idempotent(apply_phi(rep.phi, c), 2, params).status


class TestRepresentatives:
    def test_examples(self):
        rep = canonical_representative(T("i2,i4,i2i4", 4), 2)
        assert isinstance(rep, Representative) and rep.triple == T("i1,i2,i1i2")
        assert isinstance(canonical_representative(OCTAHEDRON, 2), MarginalOctahedron)
        rep = canonical_representative(OCTAHEDRON, 3)
        assert isinstance(rep, Representative)
        assert all(s == 1 for s in rep.triple.squares)

    @pytest.mark.parametrize("p", [2, 3, 4])
    def test_never_marginal_at_order3(self, p):
        for t in all_triples(3):
            assert isinstance(canonical_representative(t, p), Representative)

    def test_marginal_points_at_airbrot(self):
        rep = canonical_representative(T("i1i2,i1i3,i2i4", 4), 2)
        assert isinstance(rep, MarginalOctahedron)
        assert rep.triple == OCTAHEDRON and rep.airbrot == AIRBROT

    def test_representative_is_tricomplex_and_first(self):
        reps = {canonical_representative(t, 2).triple for t in all_triples(4) if not signature(t, 2).marginal}
        assert all(r.n == 3 for r in reps)
        assert len(reps) == 8


class TestEnumeration:
    def test_n3_p2(self):
        part = enumerate_classes(3, 2)
        assert part.class_count == 8 and part.triple_count == 56
        named = [c for c in part.classes if c.name]
        assert [c.name for c in named] == ["Airbrot"] and AIRBROT in named[0].members

    def test_n3_p3(self):
        part = enumerate_classes(3, 3)
        assert part.class_count == 4 and part.triple_count == 56

    def test_n4_p2(self):
        part = enumerate_classes(4, 2)
        assert part.class_count == 9 and part.affine_class_count == 8 and part.triple_count == 560
        marginal = [c for c in part.classes if c.marginal]
        assert len(marginal) == 1 and marginal[0].affine_link == AIRBROT
        assert OCTAHEDRON in marginal[0].members

    def test_limits(self):
        assert enumerate_classes(5, 2).triple_count == 4960
        with pytest.raises(ValueError):
            enumerate_classes(6, 2)


class TestOctahedron:
    def test_radius(self):
        assert octahedron_radius(2) == 0.25
        assert octahedron_radius(3) == pytest.approx(2 / (3 * 3**0.5))

    def test_pointwise(self):
        params = EscapeParams(1000)
        inside = Multicomplex.from_terms(4, {0b0011: 0.1, 0b0101: 0.1, 0b1001: 0.04})
        outside = Multicomplex.from_terms(4, {0b0011: 0.2, 0b0101: 0.1})
        assert member_idempotent(inside, 2, params).bounded
        assert not member_idempotent(outside, 2, params).bounded

    @pytest.mark.parametrize("p", [2, 3, 4])
    def test_check(self, p):
        v = octahedron_check(p, 25)
        assert v.passed and v.agreement == 1.0 and v.checked > 0

    def test_check_arguments(self):
        with pytest.raises(ValueError):
            octahedron_check(2, 5)


class TestAffine:
    def test_self_fit(self):
        spec = SliceSpec(2, AIRBROT, ((-2.2, 0.5), (-1.3, 1.3), (-1.3, 1.3)), (21, 21, 21), EscapeParams(200))
        g = sample_slice(spec)
        fit = fit_affine(g, g)
        assert fit.scale == pytest.approx(1.0)
        np.testing.assert_allclose(fit.translation, 0, atol=1e-12)
        assert fit.residual == 0

    def test_empty_grid(self):
        spec = SliceSpec(2, AIRBROT, ((5, 6), (5, 6), (5, 6)), (4, 4, 4))
        g = sample_slice(spec)
        with pytest.raises(ValueError):
            fit_affine(g, g)

    @pytest.mark.parametrize("p", [2, 4])
    def test_marginal(self, p):
        fit = marginal_affine(p, 33)
        assert fit.residual <= 0.05 and fit.scale > 0

    def test_odd_rejected(self):
        with pytest.raises(ValueError):
            marginal_affine(3)
