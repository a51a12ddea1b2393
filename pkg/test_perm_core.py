#!/usr/bin/env python3
"""
test_perm_core.py
=================
Tests unitaires pour perm_core.py

Couverture:
  - Permutation       : validation, composition droite→gauche (associativité
                        sur tirages aléatoires), cycles, ordre
  - parse_cycles()    : notation cyclique (aller et retour)
  - constructions     : d_i, a_p, σ[i], Δ_s σ, τ^[r] et conjugaison des blocs
  - sous-groupes      : E_r, formes (r_1 ≥ … ≥ r_t) contre énumération brute,
                        ordre p^rang de chaque représentant

Usage:
  python test_perm_core.py
  python -m pytest test_perm_core.py -v
"""

import itertools
import random
import sys
import unittest
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))
import perm_core
from perm_core import (
    Permutation,
    SubgroupShape,
    compose,
    cycle_a,
    decreasing_power_shapes,
    delta,
    descending_cycle,
    embed_block,
    extend,
    from_cycles,
    identity,
    maximal_elem_abelians,
    outer_perm,
    parse_cycles,
    parse_shape,
    regular_elem_abelian,
    subgroup_for_shape,
)


def _random_perm(rng, n):
    images = list(range(1, n + 1))
    rng.shuffle(images)
    return Permutation(tuple(images))


def _closure(generators):
    """Sous-groupe engendré, par parcours en largeur."""
    seen = {identity(generators[0].degree)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for x in frontier:
            for g in generators:
                y = compose(g, x)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


class TestPermutation(unittest.TestCase):
    """Permutations de {1,…,n}."""

    def test_rejects_non_bijection(self):
        with self.assertRaises(ValueError):
            Permutation((1, 1, 3))

    def test_compose_right_to_left(self):
        """compose(a, b) applique b puis a."""
        a = from_cycles([(1, 2)], 3)
        b = from_cycles([(2, 3)], 3)
        self.assertEqual(compose(a, b).images, (2, 3, 1))

    def test_compose_degree_mismatch(self):
        with self.assertRaises(ValueError):
            compose(identity(2), identity(3))

    def test_compose_associative_random(self):
        rng = random.Random(7)
        for n in range(1, 13):
            for _ in range(20):
                a, b, c = (_random_perm(rng, n) for _ in range(3))
                self.assertEqual(compose(compose(a, b), c), compose(a, compose(b, c)))

    def test_inverse_random(self):
        rng = random.Random(8)
        for n in (1, 5, 12):
            for _ in range(20):
                g = _random_perm(rng, n)
                self.assertTrue(compose(g, g.inverse()).is_identity())
                self.assertTrue(compose(g.inverse(), g).is_identity())

    def test_inverse(self):
        g = from_cycles([(1, 3, 2), (4, 5)], 5)
        self.assertTrue(compose(g, g.inverse()).is_identity())

    def test_order(self):
        self.assertEqual(from_cycles([(1, 2, 3), (4, 5)], 5).order(), 6)
        self.assertEqual(identity(4).order(), 1)

    def test_cycles_text(self):
        self.assertEqual(from_cycles([(3, 4), (1, 2)], 4).to_cycles(), "(1,2)(3,4)")
        self.assertEqual(identity(3).to_cycles(), "()")

    def test_extend_fixes_new_points(self):
        g = extend(from_cycles([(1, 2)], 2), 4)
        self.assertEqual(g.images, (2, 1, 3, 4))

    def test_extend_to_smaller_degree_fails(self):
        with self.assertRaises(ValueError):
            extend(identity(4), 3)


class TestParseCycles(unittest.TestCase):
    """Lecture de la notation cyclique."""

    def test_double_transposition(self):
        self.assertEqual(parse_cycles("(1,2)(3,4)", 4).images, (2, 1, 4, 3))

    def test_identity(self):
        self.assertTrue(parse_cycles("()", 3).is_identity())

    def test_round_trip_text(self):
        g = from_cycles([(1, 4, 2), (3, 5)], 6)
        self.assertEqual(parse_cycles(g.to_cycles(), 6), g)

    def test_unbalanced_parenthesis(self):
        with self.assertRaises(ValueError):
            parse_cycles("(1,2", 3)

    def test_point_out_of_range(self):
        with self.assertRaises(ValueError):
            parse_cycles("(1,7)", 3)

    def test_overlapping_cycles(self):
        with self.assertRaises(ValueError):
            parse_cycles("(1,2)(2,3)", 3)


class TestConstructions(unittest.TestCase):
    """d_i, a_p et constructions par blocs."""

    def test_descending_cycle(self):
        """d_3 : 3→2, 2→1, 1→3."""
        self.assertEqual(descending_cycle(3, 3).images, (3, 1, 2))
        self.assertEqual(descending_cycle(2, 4).images, (2, 1, 3, 4))

    def test_descending_cycle_bounds(self):
        with self.assertRaises(ValueError):
            descending_cycle(1, 3)
        with self.assertRaises(ValueError):
            descending_cycle(4, 3)

    def test_cycle_a(self):
        self.assertEqual(cycle_a(3).images, (2, 3, 1))
        self.assertTrue(cycle_a(1).is_identity())

    def test_embed_block(self):
        self.assertEqual(embed_block(cycle_a(2), 2, 4).images, (1, 2, 4, 3))

    def test_embed_block_out_of_range(self):
        with self.assertRaises(ValueError):
            embed_block(cycle_a(2), 3, 4)

    def test_delta(self):
        self.assertEqual(delta(2, cycle_a(2)).images, (2, 1, 4, 3))

    def test_outer_perm(self):
        """a_2^[2] échange les blocs {1,2} et {3,4}."""
        self.assertEqual(outer_perm(cycle_a(2), 2).images, (3, 4, 1, 2))

    def test_outer_perm_conjugates_blocks(self):
        """τ^[r] σ[i] (τ^[r])⁻¹ = σ[τ(i)]."""
        rng = random.Random(11)
        for s in (2, 3, 4):
            for r in (1, 2, 3):
                n = s * r
                for _ in range(10):
                    tau, sigma = _random_perm(rng, s), _random_perm(rng, r)
                    T = outer_perm(tau, r)
                    for i in range(1, s + 1):
                        conj = compose(compose(T, embed_block(sigma, i, n)), T.inverse())
                        self.assertEqual(conj, embed_block(sigma, tau(i), n))

    def test_delta_commutes_with_outer_perm(self):
        rng = random.Random(12)
        for _ in range(10):
            tau, sigma = _random_perm(rng, 3), _random_perm(rng, 3)
            D, T = delta(3, sigma), outer_perm(tau, 3)
            self.assertEqual(compose(D, T), compose(T, D))



class TestSubgroups(unittest.TestCase):
    """Sous-groupes p-élémentaires abéliens."""

    def _assert_elementary_abelian(self, E):
        p = E.prime
        for g in E.generators:
            self.assertEqual(g.order(), p)
        for g in E.generators:
            for h in E.generators:
                self.assertEqual(compose(g, h), compose(h, g))

    def test_regular_e2(self):
        E = regular_elem_abelian(2, 2)
        self.assertEqual([g.to_cycles() for g in E.generators], ["(1,2)(3,4)", "(1,3)(2,4)"])
        self._assert_elementary_abelian(E)

    def test_regular_e2_p3(self):
        E = regular_elem_abelian(2, 3)
        self.assertEqual(E.degree, 9)
        self._assert_elementary_abelian(E)
        self.assertEqual(len(set(E.elements())), 9)

    def test_regular_e3_is_fixed_point_free(self):
        E = regular_elem_abelian(3, 2)
        self._assert_elementary_abelian(E)
        for g in E.elements()[1:]:
            self.assertTrue(all(g(x) != x for x in range(1, 9)))

    def test_elements_budget(self):
        with self.assertRaises(ValueError):
            regular_elem_abelian(3, 2).elements(budget=4)

    def test_decreasing_power_shapes_8_2(self):
        self.assertEqual(decreasing_power_shapes(8, 2),
                         [(3,), (2, 2), (2, 1, 1), (1, 1, 1, 1)])

    def test_decreasing_power_shapes_brute_force(self):
        for p in (2, 3, 5):
            for total in range(p, 8 * p + 1, p):
                top = max(r for r in range(1, total + 1) if p ** r <= total)
                expected = set()
                for length in range(1, total // p + 1):
                    for combo in itertools.combinations_with_replacement(range(1, top + 1), length):
                        if sum(p ** r for r in combo) == total:
                            expected.add(tuple(sorted(combo, reverse=True)))
                with self.subTest(p=p, total=total):
                    shapes = decreasing_power_shapes(total, p)
                    self.assertEqual(len(shapes), len(set(shapes)))
                    self.assertEqual(set(shapes), expected)
                    self.assertEqual(shapes, sorted(shapes, reverse=True))

    def test_generated_order_is_p_to_rank(self):
        for n, p in ((4, 2), (6, 2), (8, 2), (6, 3), (9, 3), (10, 5)):
            for E in maximal_elem_abelians(n, p):
                with self.subTest(n=n, p=p, shape=E.shape.label()):
                    self._assert_elementary_abelian(E)
                    self.assertEqual(len(_closure(E.generators)), p ** E.rank)
                    self.assertEqual(set(E.elements()), _closure(E.generators))

    def test_maximal_4_2(self):
        shapes = [E.shape.label() for E in maximal_elem_abelians(4, 2)]
        self.assertEqual(shapes, ["2", "1,1"])

    def test_maximal_none_when_n_below_p(self):
        self.assertEqual(maximal_elem_abelians(3, 5), [])

    def test_maximal_6_3(self):
        subgroups = maximal_elem_abelians(6, 3)
        self.assertEqual([E.shape.parts for E in subgroups], [(1, 1)])
        self.assertEqual([g.to_cycles() for g in subgroups[0].generators],
                         ["(1,2,3)", "(4,5,6)"])

    def test_shape_2_1_in_s6(self):
        E = subgroup_for_shape(SubgroupShape((2, 1), 2), 6)
        self.assertEqual(E.rank, 3)
        self.assertEqual(E.support_blocks, ((1, 4), (5, 6)))
        self.assertEqual(E.generators[-1].to_cycles(), "(5,6)")
        self._assert_elementary_abelian(E)
        self.assertEqual([len(E.generators[s]) for s in E.factor_slices()], [2, 1])

    def test_fixed_points_stay_right(self):
        """n = 5, p = 2 : le point 5 est fixé par tous les représentants."""
        for E in maximal_elem_abelians(5, 2):
            for g in E.generators:
                self.assertEqual(g(5), 5)

    def test_parse_shape(self):
        shape = parse_shape("2,1", 2, 6)
        self.assertEqual(shape.parts, (2, 1))
        self.assertEqual(shape.rank, 3)

    def test_parse_shape_wrong_support(self):
        with self.assertRaises(ValueError):
            parse_shape("2,1", 2, 4)

    def test_parse_shape_not_decreasing(self):
        with self.assertRaises(ValueError):
            parse_shape("1,2", 2)

    def test_parse_shape_garbage(self):
        with self.assertRaises(ValueError):
            parse_shape("a,b", 2)

    def test_is_prime(self):
        self.assertEqual([q for q in range(12) if perm_core.is_prime(q)], [2, 3, 5, 7, 11])


if __name__ == "__main__":
    loader = unittest.TestLoader()
    suite = loader.loadTestsFromModule(sys.modules[__name__])
    runner = unittest.TextTestRunner(verbosity=2)
    result = runner.run(suite)
    sys.exit(0 if result.wasSuccessful() else 1)
