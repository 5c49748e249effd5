import random

import pytest

from multloc.fpmod import FPModule, Morphism
from multloc.intlinalg import mat_mul
from multloc.towers import (
    MultSubsetSeq,
    NotStabilized,
    Tower,
    adequate_depth,
    constant_hom_tower,
    delta_truncated,
    divisibility_report,
    five_term_check,
    is_weakly_cotorsion_fg,
    quotient_tower,
    telescope_complex,
    telescope_homology_check,
    torsion_submodule,
    torsion_tower,
    tower_lim,
    tower_lim1,
    weakly_cotorsion_report,
)


def seq(*gens, modulus=0):
    return MultSubsetSeq(generators=tuple(gens), modulus=modulus)


def z_mod(*factors):
    return FPModule.from_invariants(list(factors))


class TestSchedule:
    def test_round_robin(self):
        s = seq(2, 3)
        assert [s.s(n) for n in range(1, 6)] == [2, 3, 2, 3, 2]
        assert s.t(0) == 1
        assert s.t(3) == 12

    def test_recurrence(self):
        s = seq(2, 3, 5)
        for n in range(1, 12):
            assert s.t(n) == s.t(n - 1) * s.s(n)

    def test_slot_positions(self):
        s = seq(2, 3, 5)
        for n in range(1, 20):
            assert s.s(n) == s.generators[(n - 1) % 3]

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            MultSubsetSeq(generators=())
        with pytest.raises(ValueError):
            MultSubsetSeq(generators=(0,))


class TestTorsionSubmodule:
    def test_z12_at_2(self):
        g = torsion_submodule(z_mod(12), seq(2))
        assert g.carrier.invariants() == (4,)
        assert g.witness == 4

    def test_free_module(self):
        g = torsion_submodule(FPModule.from_presentation([], gens=1), seq(2))
        assert g.carrier.is_zero()

    def test_z9_at_2(self):
        g = torsion_submodule(z_mod(9), seq(2))
        assert g.carrier.is_zero()


class TestTowers:
    def test_quotient_tower_z12(self):
        t = quotient_tower(z_mod(12), seq(2), 4)
        assert t.stage_invariants() == [(2,), (4,), (4,), (4,)]
        assert t.transitions_surjective()

    def test_quotient_tower_free(self):
        t = quotient_tower(FPModule.from_presentation([], gens=1), seq(2), 3)
        assert t.stage_invariants() == [(2,), (4,), (8,)]

    def test_quotient_tower_invertible(self):
        t = quotient_tower(z_mod(5), seq(2), 3)
        assert all(inv == () for inv in t.stage_invariants())

    def test_torsion_tower_z12(self):
        t = torsion_tower(z_mod(12), seq(2), 3)
        assert t.stage_invariants() == [(2,), (4,), (4,)]
        assert t.check_coherent()

    def test_torsion_tower_free(self):
        t = torsion_tower(FPModule.from_presentation([], gens=2), seq(2), 3)
        assert all(inv == () for inv in t.stage_invariants())

    def test_torsion_tower_sum(self):
        # kernels of 2, 4, 8 on Z/8 + Z/2 have orders 4, 8, 16
        t = torsion_tower(z_mod(8, 2), seq(2), 3)
        orders = [s.order() for s in t.stages]
        assert orders == [4, 8, 16]


class TestTowerLim:
    def test_quotient_z12(self):
        t = quotient_tower(z_mod(12), seq(2), 12)
        lim = tower_lim(t)
        assert lim.module.invariants() == (4,)
        assert lim.certificate.stable_index == 1

    def test_constant_identity(self):
        m = z_mod(3)
        stages = [m] * 6
        trans = [Morphism.identity(m) for _ in range(5)]
        lim = tower_lim(Tower(stages=stages, transitions=trans))
        assert lim.module.invariants() == (3,)

    def test_growing_not_stabilized(self):
        t = quotient_tower(FPModule.from_presentation([], gens=1), seq(2), 8)
        with pytest.raises(NotStabilized):
            tower_lim(t)

    def test_idempotent(self):
        t = quotient_tower(z_mod(12), seq(2), 12)
        lim = tower_lim(t)
        # rebuild the stable-image tower and take the limit again
        n0 = lim.certificate.stable_index
        hi = lim.certificate.verified_through
        stages = []
        rows = {}
        from multloc.towers import _submodule_on_rows
        for i in range(n0, hi + 1):
            rows[i] = t.composite(i, t.depth - 1)
            stages.append(_submodule_on_rows(t.stages[i], rows[i]))
        from multloc.fpmod import factor_through_submodule
        trans = []
        for k in range(len(stages) - 1):
            i = n0 + k
            mapped = mat_mul(rows[i + 1], t.transitions[i].mat())
            coeffs = factor_through_submodule(mapped, rows[i], t.stages[i])
            trans.append(Morphism.make(stages[k + 1], stages[k], coeffs))
        lim2 = tower_lim(Tower(stages=stages, transitions=trans))
        assert lim2.module.invariants() == lim.module.invariants()


class TestTowerLim1:
    def test_finite_always_zero(self):
        t = torsion_tower(z_mod(12), seq(2), 8)
        v = tower_lim1(t)
        assert v.is_zero()
        assert v.certificate_kind == "finite_stages"

    def test_constant_identity_zero(self):
        m = z_mod(3)
        t = Tower(stages=[m] * 6, transitions=[Morphism.identity(m)] * 5)
        assert tower_lim1(t).is_zero()

    def test_shrinking_unknown(self):
        free = FPModule.from_presentation([], gens=1)
        t = constant_hom_tower(free, seq(2), 8)
        v = tower_lim1(t)
        assert v.verdict == "unknown"
        assert v.witness_chain is not None


class TestTelescope:
    def test_n1(self):
        tc = telescope_complex(seq(2), 1)
        assert tc.differential == [[1]]
        assert tc.companion == 2
        assert tc.verify_witnesses()["all_ok"]

    def test_n2_schedule_23(self):
        tc = telescope_complex(seq(2, 3), 2)
        assert tc.differential == [[1, 0], [-2, 1]]
        assert tc.companion == 6
        assert tc.verify_witnesses()["all_ok"]

    def test_n3_constant(self):
        tc = telescope_complex(seq(2), 3)
        assert tc.differential[1][0] == -2 and tc.differential[2][1] == -2
        assert tc.verify_witnesses()["all_ok"]

    def test_witnesses_random(self):
        rng = random.Random(77)
        for _ in range(25):
            gens = tuple(rng.choice([2, 3, 5, 6]) for _ in range(rng.randint(1, 3)))
            n = rng.randint(1, 6)
            tc = telescope_complex(MultSubsetSeq(generators=gens), n)
            checks = tc.verify_witnesses()
            assert checks["all_ok"], (gens, n, checks)

    def test_homology_z10(self):
        rep = telescope_homology_check(seq(2, 3), 2, z_mod(10))
        assert rep.h0_engine == (2,) and rep.h1_engine == (2,)
        assert rep.passed()

    def test_homology_free(self):
        rep = telescope_homology_check(seq(2), 3, FPModule.from_presentation([], gens=1))
        assert rep.h0_engine == (8,)
        assert rep.h1_engine == ()
        assert rep.passed()

    def test_homology_zero_module(self):
        rep = telescope_homology_check(seq(2), 2, FPModule.zero())
        assert rep.h0_engine == () and rep.h1_engine == ()
        assert rep.passed()


class TestDelta:
    def test_z12_at_2(self):
        rep = delta_truncated(z_mod(12), seq(2))
        assert rep.delta_equals_lambda
        assert rep.delta_invariants == (4,)

    def test_z5_at_2(self):
        rep = delta_truncated(z_mod(5), seq(2))
        assert rep.delta_invariants == ()

    def test_trivial_subset(self):
        rep = delta_truncated(FPModule.from_presentation([], gens=1), seq(1))
        assert rep.delta_invariants == ()

    def test_free_part_not_stabilized(self):
        with pytest.raises(NotStabilized):
            delta_truncated(FPModule.from_presentation([], gens=1), seq(2))


class TestDivisibility:
    def test_z5_divisible_by_2(self):
        rep = divisibility_report(z_mod(5), seq(2))
        assert rep.divisible and rep.h_divisible

    def test_z4_not_divisible(self):
        rep = divisibility_report(z_mod(4), seq(2))
        assert not rep.divisible
        assert rep.max_divisible_invariants == ()

    def test_z12_divisible_part(self):
        rep = divisibility_report(z_mod(12), seq(2))
        assert not rep.divisible
        assert rep.max_divisible_invariants == (3,)


class TestFiveTerm:
    def test_z8_at_2(self):
        rep = five_term_check(z_mod(8), seq(2))
        assert rep.hom_loc_mod_r == () and rep.hom_loc == ()
        assert rep.delta_invariants == (8,)
        assert rep.ext_invariants == ()
        assert rep.exact_everywhere()

    def test_z5_at_2(self):
        rep = five_term_check(z_mod(5), seq(2))
        assert rep.hom_loc == (5,)
        assert rep.delta_invariants == ()
        assert rep.ext_invariants == ()
        assert rep.exact_everywhere()

    def test_zero_module(self):
        rep = five_term_check(FPModule.zero(), seq(2))
        assert rep.exact_everywhere()
        assert rep.module_invariants == ()

    def test_mixed_z12(self):
        rep = five_term_check(z_mod(12), seq(2))
        assert rep.hom_loc == (3,)
        assert rep.delta_invariants == (4,)
        assert rep.exact_everywhere()

    def test_multi_generator(self):
        rep = five_term_check(z_mod(36), seq(2, 3))
        assert rep.delta_invariants == (36,)
        assert rep.hom_loc == ()
        assert rep.exact_everywhere()

    def test_small_battery(self):
        rng = random.Random(303)
        gen_sets = [(2,), (3,), (2, 3), (6,), (2, 3, 5, 6)]
        for _ in range(25):
            inv = [rng.choice([2, 3, 4, 5, 8, 9, 12]) for _ in range(rng.randint(1, 3))]
            m = z_mod(*inv)
            if m.order() > 64:
                continue
            s = MultSubsetSeq(generators=rng.choice(gen_sets))
            rep = five_term_check(m, s)
            assert rep.exact_everywhere(), (inv, s.generators)
            assert rep.lim1.is_zero()


class TestWeaklyCotorsion:
    def test_torsion_true(self):
        assert is_weakly_cotorsion_fg(z_mod(36), 2) is True
        rep = weakly_cotorsion_report(z_mod(36), 2)
        assert rep["oracle_agrees"]

    def test_free_false(self):
        free = FPModule.from_presentation([], gens=1)
        assert is_weakly_cotorsion_fg(free, 2) is False
        rep = weakly_cotorsion_report(free, 2)
        assert rep["oracle_agrees"]
        assert rep["free_part_growth"][0] == [2]
        assert not rep["free_part_stabilized"]

    def test_m_equals_one(self):
        free = FPModule.from_presentation([], gens=1)
        assert is_weakly_cotorsion_fg(free, 1) is True
        assert weakly_cotorsion_report(free, 1)["oracle_agrees"]


class TestAdequateDepth:
    def test_worst_case_certifies(self):
        # the deepest battery case: full 2-exponent with the 4-generator set
        m = z_mod(64)
        s = seq(2, 3, 5, 6)
        assert adequate_depth(m, s) > 4 * 6 + 4
        rep = five_term_check(m, s)
        assert rep.exact_everywhere()
        assert rep.delta_invariants == (64,)

    def test_default_floor(self):
        assert adequate_depth(z_mod(2), seq(2)) == 12
