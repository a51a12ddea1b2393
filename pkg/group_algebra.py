#!/usr/bin/env python3
"""
group_algebra.py
================
Éléments creux de F_p S_n, élément de Dynkin–Specht–Wever
ω_n = (1 − d_2)(1 − d_3)⋯(1 − d_n) et redressement (straightening).

Redressement
------------
  ω_n = −ω_{r−1} d_r ω_n pour 2 ≤ r ≤ n. Si ρ(1) ≠ 1 et r = ρ^{-1}(1),
  ρ ω_n = −ρ ω_{r−1} d_r ω_n et chaque terme de ρ ω_{r−1} d_r fixe 1
  (d_r envoie 1 sur r, ω_{r−1} fixe r, ρ envoie r sur 1). Une seule passe
  suffit donc pour exprimer ρ ω_n dans la base {σ ω_n : σ(1) = 1}.

Les coefficients vivent dans GF(p) (entiers 1 … p−1, jamais de zéro stocké).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

from lie_config import DSW_MAX_DEGREE
from perm_core import Permutation, descending_cycle, identity

logger = logging.getLogger(__name__)


# ── Éléments de l'algèbre de groupe ──────────────────────────────────────────


@dataclass(frozen=True)
class GroupAlgebraElement:
    """Combinaison F_p-linéaire creuse de permutations de degré n.

    terms : couples (images, coefficient) triés par images, coefficients
    dans 1 … p−1.
    """

    degree: int
    p: int
    terms: tuple[tuple[tuple[int, ...], int], ...]

    @classmethod
    def from_dict(cls, degree: int, p: int, mapping: dict) -> "GroupAlgebraElement":
        """Construit l'élément depuis {images ou Permutation: coefficient}."""
        acc: dict[tuple[int, ...], int] = {}
        for key, c in mapping.items():
            images = key.images if isinstance(key, Permutation) else tuple(key)
            if len(images) != degree:
                raise ValueError(f"Permutation de degré {len(images)} ≠ {degree}")
            acc[images] = (acc.get(images, 0) + c) % p
        return cls(degree, p, tuple(sorted((k, v) for k, v in acc.items() if v)))

    @classmethod
    def from_perm(cls, perm: Permutation, p: int, coeff: int = 1) -> "GroupAlgebraElement":
        return cls.from_dict(perm.degree, p, {perm.images: coeff})

    @classmethod
    def one(cls, n: int, p: int) -> "GroupAlgebraElement":
        return cls.from_perm(identity(n), p)

    @classmethod
    def zero(cls, n: int, p: int) -> "GroupAlgebraElement":
        return cls(n, p, ())

    def as_dict(self) -> dict[tuple[int, ...], int]:
        return dict(self.terms)

    def support(self) -> list[Permutation]:
        return [Permutation._trusted(images) for images, _ in self.terms]

    def coefficient(self, perm: Permutation | tuple[int, ...]) -> int:
        images = perm.images if isinstance(perm, Permutation) else tuple(perm)
        return self.as_dict().get(images, 0)

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "GroupAlgebraElement") -> None:
        if self.degree != other.degree:
            raise ValueError(f"Degrés différents : {self.degree} ≠ {other.degree}")
        if self.p != other.p:
            raise ValueError(f"Caractéristiques différentes : {self.p} ≠ {other.p}")

    def __add__(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        self._check(other)
        acc = self.as_dict()
        for k, v in other.terms:
            acc[k] = acc.get(k, 0) + v
        return GroupAlgebraElement.from_dict(self.degree, self.p, acc)

    def __sub__(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        return self + other.scale(-1)

    def scale(self, c: int) -> "GroupAlgebraElement":
        return GroupAlgebraElement.from_dict(
            self.degree, self.p, {k: v * c for k, v in self.terms}
        )

    def __mul__(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        return ga_multiply(self, other)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(
            f"{c}*{Permutation._trusted(images).to_cycles()}" for images, c in self.terms
        )


def _compose_images(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(a[x - 1] for x in b)


def ga_multiply(a: GroupAlgebraElement, b: GroupAlgebraElement) -> GroupAlgebraElement:
    """Produit de convolution (composition de droite à gauche)."""
    a._check(b)
    p = a.p
    acc: dict[tuple[int, ...], int] = {}
    for ga, ca in a.terms:
        for gb, cb in b.terms:
            key = _compose_images(ga, gb)
            acc[key] = (acc.get(key, 0) + ca * cb) % p
    return GroupAlgebraElement.from_dict(a.degree, p, acc)


# ── Élément de Dynkin–Specht–Wever ───────────────────────────────────────────


@lru_cache(maxsize=None)
def dsw_element(n: int, p: int) -> GroupAlgebraElement:
    """ω_n = (1 − d_2)⋯(1 − d_n) développé ; ω_1 = 1."""
    if n < 1:
        raise ValueError(f"ω_n exige n ≥ 1 (n={n})")
    if n > DSW_MAX_DEGREE:
        raise ValueError(f"ω_{n} : n dépasse la borne LIE_DSW_MAX_DEGREE={DSW_MAX_DEGREE}")
    if n == 1:
        return GroupAlgebraElement.one(1, p)
    prev = dsw_element(n - 1, p)
    d_n = descending_cycle(n, n).images
    acc: dict[tuple[int, ...], int] = {}
    for images, c in prev.terms:
        lifted = images + (n,)
        acc[lifted] = (acc.get(lifted, 0) + c) % p
        shifted = _compose_images(lifted, d_n)
        acc[shifted] = (acc.get(shifted, 0) - c) % p
    omega = GroupAlgebraElement.from_dict(n, p, acc)
    logger.debug("ω_%d sur GF(%d) : %d termes", n, p, len(omega.terms))
    return omega


def embedded_dsw(s: int, n: int, p: int) -> GroupAlgebraElement:
    """ω_s vu dans F_p S_n (fixe s+1, …, n)."""
    omega = dsw_element(s, p)
    tail = tuple(range(s + 1, n + 1))
    return GroupAlgebraElement.from_dict(n, p, {images + tail: c for images, c in omega.terms})


def omega_square(n: int, p: int) -> GroupAlgebraElement:
    omega = dsw_element(n, p)
    return ga_multiply(omega, omega)


def omega_square_check(n: int, p: int) -> bool:
    """ω_n² = (n mod p)·ω_n exactement."""
    omega = dsw_element(n, p)
    return omega_square(n, p) == omega.scale(n)


def omega_product_check(s: int, n: int, p: int) -> bool:
    """ω_s ω_n = (s mod p)·ω_n pour 1 ≤ s ≤ n."""
    if not 1 <= s <= n:
        raise ValueError(f"1 ≤ s ≤ n attendu (s={s}, n={n})")
    omega = dsw_element(n, p)
    return ga_multiply(embedded_dsw(s, n, p), omega) == omega.scale(s)


def straightening_identity_holds(r: int, n: int, p: int) -> bool:
    """(1 + ω_{r−1} d_r) ω_n = 0 dans F_p S_n."""
    if not 2 <= r <= n:
        raise ValueError(f"2 ≤ r ≤ n attendu (r={r}, n={n})")
    d_r = GroupAlgebraElement.from_perm(descending_cycle(r, n), p)
    left = GroupAlgebraElement.one(n, p) + ga_multiply(embedded_dsw(r - 1, n, p), d_r)
    return ga_multiply(left, dsw_element(n, p)).is_zero()


# ── Redressement ──────────────────────────────────────────────────────────────


@lru_cache(maxsize=None)
def _omega_times_d(r: int, n: int, p: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    """Termes de −ω_{r−1} d_r dans S_n (signe déjà appliqué)."""
    d_r = descending_cycle(r, n).images
    tail = tuple(range(r, n + 1))
    out = []
    for images, c in dsw_element(r - 1, p).terms:
        out.append((_compose_images(images + tail, d_r), (-c) % p))
    return tuple(out)


def straighten_images(images: tuple[int, ...], p: int) -> dict[tuple[int, ...], int]:
    """Chemin rapide de straighten sur des tables d'images ; {σ: coefficient}."""
    if images[0] == 1:
        return {images: 1}
    n = len(images)
    r = images.index(1) + 1
    acc: dict[tuple[int, ...], int] = {}
    for tau, c in _omega_times_d(r, n, p):
        key = _compose_images(images, tau)
        acc[key] = (acc.get(key, 0) + c) % p
    return {k: v for k, v in acc.items() if v}


def straighten(rho: Permutation, n: int, p: int) -> GroupAlgebraElement:
    """x supporté sur S_{n,1} = {σ : σ(1) = 1} avec x ω_n = ρ ω_n."""
    if rho.degree != n:
        raise ValueError(f"ρ de degré {rho.degree}, attendu {n}")
    return GroupAlgebraElement.from_dict(n, p, straighten_images(rho.images, p))
