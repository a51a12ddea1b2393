#!/usr/bin/env python3
"""
perm_core.py
============
Permutations de {1,…,n}, constructions par blocs (σ[i], Δ_s σ, τ^[r]) et
sous-groupes p-élémentaires abéliens maximaux distingués de S_n.

Conventions
-----------
  - points numérotés à partir de 1 dans toutes les interfaces ;
  - composition de droite à gauche : compose(a, b)(x) = a(b(x)) ;
  - format texte : notation cyclique, ex. "(1,2)(3,4)", identité "()".

Représentants des classes de conjugaison (forme normale)
--------------------------------------------------------
  Pour (r_1 ≥ … ≥ r_t) avec Σ p^{r_i} = p·⌊n/p⌋ et s_j = Σ_{i≤j} p^{r_i},
  E = Π_j E_{r_j}[s_j / p^{r_j}], facteurs à supports disjoints tassés à
  gauche ; les points fixes n − p⌊n/p⌋ restent à droite.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import reduce
from math import lcm

# ── Permutations ──────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class Permutation:
    """Élément de S_n donné par sa table d'images (1-based)."""

    images: tuple[int, ...]

    def __post_init__(self):
        n = len(self.images)
        if n < 1:
            raise ValueError("Permutation de degré nul")
        if sorted(self.images) != list(range(1, n + 1)):
            raise ValueError(f"Pas une bijection de {{1,…,{n}}} : {self.images}")

    @classmethod
    def _trusted(cls, images: tuple[int, ...]) -> "Permutation":
        # Chemin rapide (straightening) : images déjà validées par construction.
        obj = object.__new__(cls)
        object.__setattr__(obj, "images", images)
        return obj

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x - 1]

    def inverse(self) -> "Permutation":
        inv = [0] * self.degree
        for j, img in enumerate(self.images, start=1):
            inv[img - 1] = j
        return Permutation._trusted(tuple(inv))

    def is_identity(self) -> bool:
        return all(img == j for j, img in enumerate(self.images, start=1))

    def order(self) -> int:
        return reduce(lcm, (len(c) for c in self.cycles()), 1)

    def cycles(self) -> list[tuple[int, ...]]:
        """Cycles non triviaux, chacun commençant par son plus petit point."""
        seen = set()
        out = []
        for start in range(1, self.degree + 1):
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            x = self(start)
            while x != start:
                cyc.append(x)
                seen.add(x)
                x = self(x)
            if len(cyc) > 1:
                out.append(tuple(cyc))
        return out

    def to_cycles(self) -> str:
        cyc = self.cycles()
        if not cyc:
            return "()"
        return "".join("(" + ",".join(str(x) for x in c) + ")" for c in cyc)

    def __str__(self) -> str:
        return self.to_cycles()


def identity(n: int) -> Permutation:
    return Permutation._trusted(tuple(range(1, n + 1)))


def from_cycles(cycles: list[tuple[int, ...]] | tuple, n: int) -> Permutation:
    """Construit la permutation de degré n produit des cycles donnés.

    Les cycles doivent être disjoints (ex. [(1,2),(3,4)]).
    """
    images = list(range(1, n + 1))
    touched = set()
    for cyc in cycles:
        for x in cyc:
            if not 1 <= x <= n:
                raise ValueError(f"Point {x} hors de {{1,…,{n}}}")
            if x in touched:
                raise ValueError(f"Cycles non disjoints (point {x})")
            touched.add(x)
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            images[a - 1] = b
    return Permutation(tuple(images))


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, n: int) -> Permutation:
    """Lit la notation cyclique 1-based, ex. "(1,2)(3,4)" ; "()" = identité."""
    text = text.strip()
    if not text:
        raise ValueError("Notation cyclique vide")
    if _CYCLE_RE.sub("", text).strip():
        raise ValueError(f"Notation cyclique invalide : {text!r}")
    cycles = []
    for body in _CYCLE_RE.findall(text):
        body = body.strip()
        if not body:
            continue
        cycles.append(tuple(int(tok) for tok in body.split(",")))
    return from_cycles(cycles, n)


def compose(a: Permutation, b: Permutation) -> Permutation:
    """a∘b : on applique b puis a (composition de droite à gauche)."""
    if a.degree != b.degree:
        raise ValueError(f"Degrés différents : {a.degree} ≠ {b.degree}")
    ai = a.images
    return Permutation._trusted(tuple(ai[x - 1] for x in b.images))


def extend(perm: Permutation, n: int) -> Permutation:
    """Vue de S_m ⊆ S_n : fixe ponctuellement {m+1,…,n}."""
    if n < perm.degree:
        raise ValueError(f"Impossible de plonger S_{perm.degree} dans S_{n}")
    return Permutation._trusted(perm.images + tuple(range(perm.degree + 1, n + 1)))


# ── Constructions par blocs ─────────────────────────────────────────────────────

def descending_cycle(i: int, n: int) -> Permutation:
    """d_i = (i, i−1, …, 1) : i→i−1, …, 2→1, 1→i ; fixe les points > i."""
    if not 2 <= i <= n:
        raise ValueError(f"d_i exige 2 ≤ i ≤ n (i={i}, n={n})")
    images = [i] + list(range(1, i)) + list(range(i + 1, n + 1))
    return Permutation._trusted(tuple(images))


def cycle_a(p: int) -> Permutation:
    """a_p = (1, 2, …, p) ∈ S_p."""
    if p < 1:
        raise ValueError("a_p exige p ≥ 1")
    if p == 1:
        return identity(1)
    return Permutation._trusted(tuple(range(2, p + 1)) + (1,))


def embed_block(sigma: Permutation, i: int, n: int) -> Permutation:
    """σ[i] : (i−1)r + j ↦ (i−1)r + σ(j), tout le reste fixe."""
    r = sigma.degree
    if i < 1 or i * r > n:
        raise ValueError(f"Bloc {i} de taille {r} hors de {{1,…,{n}}}")
    images = list(range(1, n + 1))
    shift = (i - 1) * r
    for j, img in enumerate(sigma.images, start=1):
        images[shift + j - 1] = shift + img
    return Permutation._trusted(tuple(images))


def delta(s: int, sigma: Permutation) -> Permutation:
    """Δ_s σ = Π_{i=1}^s σ[i] ∈ S_{rs}."""
    if s < 1:
        raise ValueError("Δ_s exige s ≥ 1")
    n = s * sigma.degree
    return reduce(compose, (embed_block(sigma, i, n) for i in range(1, s + 1)))


def outer_perm(tau: Permutation, r: int) -> Permutation:
    """τ^[r] : (i−1)r + j ↦ (τ(i)−1)r + j, permutation rigide des blocs."""
    if r < 1:
        raise ValueError("τ^[r] exige r ≥ 1")
    images = []
    for i in range(1, tau.degree + 1):
        base = (tau(i) - 1) * r
        images.extend(base + j for j in range(1, r + 1))
    return Permutation._trusted(tuple(images))


# ── Sous-groupes p-élémentaires abéliens ─────────────────────────────────────


@dataclass(frozen=True)
class SubgroupShape:
    """Suite faiblement décroissante (r_1, …, r_t) pour un premier p."""

    parts: tuple[int, ...]
    prime: int

    def __post_init__(self):
        if any(r < 1 for r in self.parts):
            raise ValueError(f"Parts non positives : {self.parts}")
        if any(a < b for a, b in zip(self.parts, self.parts[1:])):
            raise ValueError(f"Parts non décroissantes : {self.parts}")

    @property
    def rank(self) -> int:
        return sum(self.parts)

    @property
    def support_size(self) -> int:
        return sum(self.prime ** r for r in self.parts)

    def label(self) -> str:
        return ",".join(str(r) for r in self.parts)

    def __str__(self) -> str:
        return self.label()


def parse_shape(text: str, p: int, n: int | None = None) -> SubgroupShape:
    """Lit "r1,r2,…" et vérifie Σ p^{r_i} = p⌊n/p⌋ si n est donné."""
    try:
        parts = tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise ValueError(f"Forme invalide : {text!r} (entiers séparés par des virgules)")
    if not parts:
        raise ValueError("Forme vide")
    shape = SubgroupShape(parts, p)
    if n is not None and shape.support_size != p * (n // p):
        raise ValueError(
            f"Forme {shape.label()} : Σ p^r_i = {shape.support_size} ≠ p⌊n/p⌋ = {p * (n // p)}"
        )
    return shape


@dataclass(frozen=True)
class ElemAbelianSubgroup:
    """k générateurs d'ordre p qui commutent, supports par facteur disjoints."""

    generators: tuple[Permutation, ...]
    shape: SubgroupShape
    support_blocks: tuple[tuple[int, int], ...] = field(default=())

    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def degree(self) -> int:
        return self.generators[0].degree

    @property
    def prime(self) -> int:
        return self.shape.prime

    def factor_slices(self) -> list[slice]:
        """Indices de générateurs de chaque facteur E_{r_j}, dans l'ordre."""
        out, start = [], 0
        for r in self.shape.parts:
            out.append(slice(start, start + r))
            start += r
        return out

    def elements(self, budget: int | None = None) -> list[Permutation]:
        """Énumère les p^k éléments g_1^{a_1}⋯g_k^{a_k} (ordre lexicographique)."""
        p = self.prime
        size = p ** self.rank
        if budget is not None and size > budget:
            raise ValueError(f"|E| = {size} dépasse le budget {budget}")
        elems = [identity(self.degree)]
        for g in self.generators:
            powers = [identity(self.degree)]
            for _ in range(p - 1):
                powers.append(compose(g, powers[-1]))
            elems = [compose(x, gp) for x in elems for gp in powers]
        return elems


def regular_elem_abelian(r: int, p: int) -> ElemAbelianSubgroup:
    """E_r = ⟨Δ_{p^{r−1}} a_p, Δ_{p^{r−2}} a_p^[p], …, a_p^[p^{r−1}]⟩ ⊆ S_{p^r}.

    Les générateurs suivent l'ordre de la définition (diagonale la plus
    grossière d'abord) : c'est le système de coordonnées des variétés de rang.
    """
    if r < 1:
        raise ValueError("E_r exige r ≥ 1")
    a = cycle_a(p)
    gens = []
    for k in range(1, r + 1):
        inner = a if k == 1 else outer_perm(a, p ** (k - 1))
        gens.append(delta(p ** (r - k), inner))
    return ElemAbelianSubgroup(tuple(gens), SubgroupShape((r,), p), ((1, p ** r),))


def decreasing_power_shapes(total: int, p: int) -> list[tuple[int, ...]]:
    """Suites faiblement décroissantes (r_1 ≥ … ≥ 1) avec Σ p^{r_i} = total.

    Ordre de sortie : lexicographique décroissant ((3), (2,2), (2,1,1), …).
    """
    out: list[tuple[int, ...]] = []

    def rec(remaining: int, max_r: int, prefix: tuple[int, ...]):
        if remaining == 0:
            out.append(prefix)
            return
        for r in range(max_r, 0, -1):
            if p ** r <= remaining:
                rec(remaining - p ** r, r, prefix + (r,))

    if total <= 0:
        return out
    top = 1
    while p ** (top + 1) <= total:
        top += 1
    rec(total, top, ())
    return out


def subgroup_for_shape(shape: SubgroupShape, n: int) -> ElemAbelianSubgroup:
    """Π_j E_{r_j}[s_j / p^{r_j}] plongé dans S_n (tassé à gauche)."""
    p = shape.prime
    if shape.support_size > n:
        raise ValueError(f"Forme {shape.label()} trop grande pour n={n}")
    gens: list[Permutation] = []
    blocks = []
    s = 0
    for r in shape.parts:
        size = p ** r
        s += size
        block_index = s // size
        for g in regular_elem_abelian(r, p).generators:
            gens.append(embed_block(g, block_index, n))
        blocks.append((s - size + 1, s))
    return ElemAbelianSubgroup(tuple(gens), shape, tuple(blocks))


def maximal_elem_abelians(n: int, p: int) -> list[ElemAbelianSubgroup]:
    """Représentants distingués des p-sous-groupes élémentaires maximaux de S_n."""
    k = n // p
    return [subgroup_for_shape(SubgroupShape(parts, p), n)
            for parts in decreasing_power_shapes(p * k, p)]


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, int(p ** 0.5) + 1))
