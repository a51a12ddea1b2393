#!/usr/bin/env python3
"""
test_lie_module.py
==================
Tests unitaires et de régression pour lie_module.py

Couverture:
  - LieBasis                   : (n−1)! éléments, ordre lexicographique, rang/dérang
  - action_matrix()            : homomorphisme, identité, oracle régulier
  - verify_dimension()         : rang de {σω_n} = (n−1)!
  - verify_free_over_point_stabilizer()
  - restrict()                 : matrices qui commutent, M^p = I
  - cache LIEM                 : aller-retour, erreurs de format distinctes,
                                 taille du fichier, provenance "cache"

Usage:
  python test_lie_module.py
  python -m pytest test_lie_module.py -v
"""

import math
import random
import sys
import tempfile
import unittest
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))
import lie_module
from exact_linalg import DenseMatrix, get_field
from lie_config import ResourceLimitError
from lie_module import (
    BUILD_COUNTER,
    CacheFormatError,
    CacheMagicError,
    CacheMismatchError,
    CacheTruncatedError,
    CacheVersionError,
    LieBasis,
    action_matrix,
    build_representation,
    cache_load,
    cache_path,
    clear_cache,
    decode_liem,
    encode_liem,
    list_cache,
    matrix_builds,
    oracle_action_matrix,
    restrict,
    verify_dimension,
    verify_free_over_point_stabilizer,
)
from perm_core import Permutation, compose, from_cycles, identity, maximal_elem_abelians


def _random_perm(rng, n):
    images = list(range(1, n + 1))
    rng.shuffle(images)
    return Permutation(tuple(images))


class TestLieBasis(unittest.TestCase):
    """Base {σω_n : σ(1) = 1}."""

    def test_size(self):
        for n in range(1, 7):
            self.assertEqual(LieBasis(n).dim, math.factorial(n - 1))

    def test_entries_fix_one_in_lex_order(self):
        basis = LieBasis(4)
        self.assertTrue(all(images[0] == 1 for images in basis.elements))
        self.assertEqual(list(basis.elements), sorted(basis.elements))

    def test_rank_unrank(self):
        basis = LieBasis(5)
        for i in range(basis.dim):
            self.assertEqual(basis.rank(basis.unrank(i)), i)

    def test_rank_rejects_moved_one(self):
        with self.assertRaises(ValueError):
            LieBasis(3).rank((2, 1, 3))

    def test_invalid_degree(self):
        with self.assertRaises(ValueError):
            LieBasis(0)


class TestActionMatrix(unittest.TestCase):
    """Matrices d'action par redressement."""

    def test_identity_maps_to_identity(self):
        for n, p in ((3, 2), (4, 3), (5, 2)):
            M = action_matrix(identity(n), n, p)
            self.assertEqual(M, DenseMatrix.identity(get_field(p), math.factorial(n - 1)))

    def test_homomorphism_random_pairs(self):
        rng = random.Random(4242)
        for n in range(2, 7):
            pairs = 100 if n <= 5 else 10
            for p in (2, 3):
                for _ in range(pairs):
                    g, h = _random_perm(rng, n), _random_perm(rng, n)
                    with self.subTest(n=n, p=p, g=str(g), h=str(h)):
                        self.assertEqual(
                            action_matrix(g, n, p) @ action_matrix(h, n, p),
                            action_matrix(compose(g, h), n, p),
                        )

    def test_double_transposition_squares_to_identity(self):
        M = action_matrix(from_cycles([(1, 2), (3, 4)], 4), 4, 2)
        self.assertEqual(M @ M, DenseMatrix.identity(get_field(2), 6))

    def test_matches_regular_module_oracle(self):
        rng = random.Random(7)
        for n in range(2, 6):
            for p in (2, 3, 5):
                for _ in range(10):
                    g = _random_perm(rng, n)
                    self.assertEqual(action_matrix(g, n, p), oracle_action_matrix(g, n, p))

    def test_degree_mismatch(self):
        with self.assertRaises(ValueError):
            action_matrix(identity(3), 4, 2)

    def test_resource_bound(self):
        with self.assertRaises(ResourceLimitError):
            action_matrix(identity(9), 9, 3)

    def test_build_counter(self):
        BUILD_COUNTER.reset()
        action_matrix(identity(3), 3, 2)
        action_matrix(identity(3), 3, 3)
        self.assertEqual(matrix_builds(), 2)


class TestOracles(unittest.TestCase):
    """Oracles dans le module régulier F_p S_n."""

    def test_dimension_small(self):
        for n in range(1, 7):
            for p in (2, 3, 5):
                with self.subTest(n=n, p=p):
                    self.assertTrue(verify_dimension(n, p))

    def test_dimension_n7(self):
        for p in (2, 3, 5):
            with self.subTest(p=p):
                self.assertTrue(verify_dimension(7, p))

    def test_free_over_point_stabilizer_n7(self):
        for p in (2, 3, 5):
            with self.subTest(p=p):
                self.assertTrue(verify_free_over_point_stabilizer(7, p))

    def test_free_over_point_stabilizer(self):
        for n in range(2, 7):
            for p in (2, 3):
                with self.subTest(n=n, p=p):
                    self.assertTrue(verify_free_over_point_stabilizer(n, p))

    def test_oracle_bound(self):
        with self.assertRaises(ResourceLimitError):
            verify_dimension(8, 2)
        with self.assertRaises(ResourceLimitError):
            verify_free_over_point_stabilizer(8, 2)


class TestRestrict(unittest.TestCase):
    """Restriction à un p-sous-groupe abélien élémentaire."""

    def test_commuting_matrices_of_order_p(self):
        for n, p in ((4, 2), (6, 3)):
            for E in maximal_elem_abelians(n, p):
                rep = build_representation(n, p, E.generators)
                mats = restrict(rep, E)
                eye = DenseMatrix.identity(get_field(p), rep.dim)
                for A in mats:
                    self.assertEqual(A.power(p), eye)
                for A in mats:
                    for B in mats:
                        self.assertEqual(A @ B, B @ A)

    def test_small_subgroup_of_s3(self):
        """⟨(1,2)⟩ ⊂ S_3 sur Lie(3) : matrices 2×2."""
        E = maximal_elem_abelians(3, 2)[0]
        rep = build_representation(3, 2, E.generators)
        mats = restrict(rep, E)
        self.assertEqual([A.shape for A in mats], [(2, 2)])

    def test_generators_outside_representation_are_built(self):
        rep = build_representation(4, 2, [from_cycles([(1, 2)], 4)])
        E = maximal_elem_abelians(4, 2)[0]
        mats = restrict(rep, E)
        self.assertEqual(mats[0], action_matrix(E.generators[0], 4, 2))


class TestLiemCache(unittest.TestCase):
    """Cache binaire LIEM."""

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.cache_dir = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def _gens(self):
        return maximal_elem_abelians(6, 2)[0].generators

    def test_store_then_load(self):
        gens = self._gens()
        built = build_representation(6, 2, gens, cache_dir=self.cache_dir)
        self.assertEqual(built.provenance, "built")
        BUILD_COUNTER.reset()
        loaded = build_representation(6, 2, gens, cache_dir=self.cache_dir)
        self.assertEqual(loaded.provenance, "cache")
        self.assertEqual(matrix_builds(), 0)
        for a, b in zip(built.matrices, loaded.matrices):
            self.assertEqual(a, b)

    def test_file_size(self):
        """3 générateurs, Lie(6) : 3 × (en-tête + 120·120 octets)."""
        gens = self._gens()
        build_representation(6, 2, gens, cache_dir=self.cache_dir)
        path = cache_path(self.cache_dir, 6, 2, gens)
        header = lie_module._HEADER.size
        self.assertEqual(path.stat().st_size, 3 * (header + 120 * 120))

    def test_list_and_clear(self):
        build_representation(4, 2, maximal_elem_abelians(4, 2)[0].generators,
                             cache_dir=self.cache_dir)
        build_representation(4, 2, maximal_elem_abelians(4, 2)[1].generators,
                             cache_dir=self.cache_dir)
        self.assertEqual(len(list_cache(self.cache_dir)), 2)
        self.assertEqual(clear_cache(self.cache_dir), 2)
        self.assertEqual(list_cache(self.cache_dir), [])

    def _blob(self):
        gens = maximal_elem_abelians(4, 2)[0].generators
        rep = build_representation(4, 2, gens)
        return encode_liem(2, 4, rep.matrices)

    def test_decode_round_trip(self):
        p, n, arrays = decode_liem(self._blob())
        self.assertEqual((p, n, len(arrays)), (2, 4, 2))

    def test_bad_magic(self):
        blob = bytearray(self._blob())
        blob[0:4] = b"XXXX"
        with self.assertRaises(CacheMagicError):
            decode_liem(bytes(blob))

    def test_bad_version(self):
        blob = bytearray(self._blob())
        blob[4] = 99
        with self.assertRaises(CacheVersionError):
            decode_liem(bytes(blob))

    def test_truncated(self):
        blob = self._blob()
        with self.assertRaises(CacheTruncatedError):
            decode_liem(blob[:-5])
        with self.assertRaises(CacheTruncatedError):
            decode_liem(blob[:10])
        with self.assertRaises(CacheTruncatedError):
            decode_liem(b"")

    def test_errors_are_value_errors(self):
        self.assertTrue(issubclass(CacheFormatError, ValueError))

    def test_mismatched_parameters(self):
        gens = maximal_elem_abelians(4, 2)[0].generators
        build_representation(4, 2, gens, cache_dir=self.cache_dir)
        path = cache_path(self.cache_dir, 4, 2, gens)
        with self.assertRaises(CacheMismatchError):
            cache_load(path, 4, 3, gens)
        with self.assertRaises(CacheMismatchError):
            cache_load(path, 4, 2, gens[:1])


if __name__ == "__main__":
    loader = unittest.TestLoader()
    suite = loader.loadTestsFromModule(sys.modules[__name__])
    runner = unittest.TextTestRunner(verbosity=2)
    result = runner.run(suite)
    sys.exit(0 if result.wasSuccessful() else 1)
