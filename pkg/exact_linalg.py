#!/usr/bin/env python3
"""
exact_linalg.py
===============
Algèbre linéaire exacte sur les petits corps finis GF(p^e).

Contenu
-------
  FieldContext        : GF(p^e), p ≤ 251, e ≤ 4, q ≤ 2^16 ; éléments codés en
                        entiers c_0 + c_1 p + … + c_{e−1} p^{e−1}
  DenseMatrix         : matrice dense immuable (numpy uint8/uint16)
  rank / rank_profile : rang exact ; trois chemins
                          - GF(2)     : lignes empaquetées en mots de 64 bits
                          - GF(p)     : élimination par blocs, produits BLAS
                                        float64 (exacts tant que < 2^53)
                          - GF(p^e)   : tables de multiplication (petites
                                        matrices) ou réalisation sur GF(p)
  PolyMatrix          : matrice de polynômes de GF(p)[t_0,…,t_{s−1}] (PolyRing
                        creux de sympy)
  generic_rank        : rang sur GF(p)(t_0,…,t_{s−1}) par élimination sans division

Modules irréductibles
---------------------
  Polynôme unitaire irréductible lexicographiquement minimal de chaque degré
  (comparaison des coefficients du degré e−1 vers le degré 0). Table en dur
  pour p ∈ {2, 3, 5}, recherche exhaustive sinon ; irréductibilité vérifiée à
  la construction de chaque corps.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from sympy import GF
from sympy.polys.orderings import lex
from sympy.polys.rings import PolyElement, PolyRing

from lie_config import GENERIC_DEGREE_CAP, InternalAssertionError

logger = logging.getLogger(__name__)

# ── Configuration ─────────────────────────────────────────────────────────────

MAX_PRIME     = 251
MAX_EXT       = 4
MAX_ORDER     = 1 << 16
TABLE_ORDER   = 256        # tables q×q complètes jusqu'à q = 256
TABLE_RANK_ENTRIES = 1 << 14   # au-delà : rang par réalisation sur GF(p)
BLOCK_ROWS    = 512        # taille des blocs de lignes (élimination par blocs)
FLOAT_EXACT   = float(1 << 53)

# Coefficients du degré 0 au degré e (unitaire)
_LEAST_IRREDUCIBLE = {
    (2, 1): (0, 1),
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (3, 1): (0, 1),
    (3, 2): (1, 0, 1),
    (3, 3): (1, 2, 0, 1),
    (3, 4): (2, 1, 0, 0, 1),
    (5, 1): (0, 1),
    (5, 2): (2, 0, 1),
    (5, 3): (1, 1, 0, 1),
}


class DegreeCapExceeded(RuntimeError):
    """Élimination symbolique abandonnée : degré d'une entrée > degree_cap."""


# ── Polynômes sur GF(p) en une variable (construction des corps) ─────────────

def _poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    """Reste de a modulo m (listes de coefficients, degré croissant, m unitaire)."""
    a = list(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm and any(a):
        while a and a[-1] == 0:
            a.pop()
        if len(a) - 1 < dm:
            break
        coef = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - coef * mi) % p
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return a


def _is_irreducible(coeffs: tuple[int, ...], p: int) -> bool:
    """Test exhaustif : aucun diviseur unitaire de degré 1 … e//2."""
    e = len(coeffs) - 1
    if e < 1 or coeffs[-1] != 1:
        return False
    if e == 1:
        return True
    for d in range(1, e // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not _poly_mod(list(coeffs), list(low) + [1], p):
                return False
    return True


def least_irreducible(p: int, e: int) -> tuple[int, ...]:
    """Polynôme unitaire irréductible minimal de degré e sur GF(p)."""
    if (p, e) in _LEAST_IRREDUCIBLE:
        return _LEAST_IRREDUCIBLE[(p, e)]
    for code in range(p ** e):
        low = tuple((code // p ** i) % p for i in range(e))
        cand = low + (1,)
        if _is_irreducible(cand, p):
            return cand
    raise InternalAssertionError(f"Aucun irréductible de degré {e} sur GF({p})")


# ── Corps finis ───────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class FieldContext:
    """GF(p^e) avec tables d'arithmétique précalculées (immuable)."""

    p: int
    e: int = 1
    modulus: tuple[int, ...] = field(init=False)
    q: int = field(init=False)
    _exp: np.ndarray = field(init=False, repr=False, compare=False)
    _log: np.ndarray = field(init=False, repr=False, compare=False)
    _mul_t: np.ndarray | None = field(init=False, repr=False, compare=False)
    _add_t: np.ndarray | None = field(init=False, repr=False, compare=False)
    _neg_t: np.ndarray = field(init=False, repr=False, compare=False)
    _inv_t: np.ndarray = field(init=False, repr=False, compare=False)
    _mult_mats: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        p, e = self.p, self.e
        if p < 2 or p > MAX_PRIME or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
            raise ValueError(f"p={p} doit être un nombre premier ≤ {MAX_PRIME}")
        if not 1 <= e <= MAX_EXT:
            raise ValueError(f"Degré d'extension e={e} hors de [1, {MAX_EXT}]")
        q = p ** e
        if q > MAX_ORDER:
            raise ValueError(f"q = {p}^{e} = {q} dépasse {MAX_ORDER} (arithmétique par tables)")
        modulus = least_irreducible(p, e)
        if not _is_irreducible(modulus, p):
            raise InternalAssertionError(f"Module {modulus} réductible sur GF({p})")
        set_ = object.__setattr__
        set_(self, "modulus", modulus)
        set_(self, "q", q)

        elems = np.arange(q, dtype=np.int64)
        set_(self, "_neg_t", self._digitwise(elems, np.zeros_like(elems), lambda x, y: -x))

        # exp / log par recherche d'un élément primitif
        exp = np.zeros(2 * (q - 1), dtype=np.int64)
        log = np.zeros(q, dtype=np.int64)
        for g in range(1, q):
            x = 1
            order = 1
            x = self._mul_raw(x, g)
            while x != 1:
                order += 1
                x = self._mul_raw(x, g)
            if order == q - 1:
                x = 1
                for i in range(q - 1):
                    exp[i] = x
                    log[x] = i
                    x = self._mul_raw(x, g)
                break
        exp[q - 1:] = exp[:q - 1]
        set_(self, "_exp", exp)
        set_(self, "_log", log)

        inv = np.zeros(q, dtype=np.int64)
        inv[1:] = exp[(q - 1 - log[1:]) % (q - 1)]
        set_(self, "_inv_t", inv)

        if q <= TABLE_ORDER:
            a = elems[:, None]
            b = elems[None, :]
            set_(self, "_add_t", self._digitwise(a, b, lambda x, y: x + y))
            set_(self, "_mul_t", self._mul_log(np.broadcast_to(a, (q, q)),
                                               np.broadcast_to(b, (q, q))))
        else:
            set_(self, "_add_t", None)
            set_(self, "_mul_t", None)

        # Matrices e×e de la multiplication par a (réalisation sur GF(p))
        mats = np.zeros((q, e, e), dtype=np.int64)
        for t in range(e):
            prod = self.vmul(elems, np.full(q, p ** t, dtype=np.int64))
            for s in range(e):
                mats[:, s, t] = (prod // p ** s) % p
        set_(self, "_mult_mats", mats)

    # ── arithmétique brute ──

    def _digits(self, x: int) -> list[int]:
        return [(x // self.p ** i) % self.p for i in range(self.e)]

    def _undigits(self, d: list[int]) -> int:
        return sum(c * self.p ** i for i, c in enumerate(d))

    def _mul_raw(self, a: int, b: int) -> int:
        p = self.p
        da, db = self._digits(a), self._digits(b)
        prod = [0] * (2 * self.e - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % p
        rem = _poly_mod(prod, list(self.modulus), p) if self.e > 1 else [prod[0] % p]
        rem = rem + [0] * (self.e - len(rem))
        return self._undigits(rem[: self.e])

    def _digitwise(self, a, b, op):
        p = self.p
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        for i in range(self.e):
            pw = p ** i
            out += (op((a // pw) % p, (b // pw) % p) % p) * pw
        return out

    def _mul_log(self, a, b):
        q = self.q
        res = self._exp[(self._log[a] + self._log[b]) % (q - 1)]
        return np.where((a == 0) | (b == 0), 0, res)

    # ── opérations vectorisées (tableaux numpy int64) ──

    def vadd(self, a, b):
        if self.e == 1:
            return (a + b) % self.p
        if self._add_t is not None:
            return self._add_t[a, b]
        return self._digitwise(a, b, lambda x, y: x + y)

    def vneg(self, a):
        if self.e == 1:
            return (-a) % self.p
        return self._neg_t[a]

    def vsub(self, a, b):
        return self.vadd(a, self.vneg(b))

    def vmul(self, a, b):
        if self.e == 1:
            return (a * b) % self.p
        if self._mul_t is not None:
            return self._mul_t[a, b]
        a, b = np.broadcast_arrays(np.asarray(a), np.asarray(b))
        return self._mul_log(a, b)

    # ── opérations scalaires ──

    def add(self, a: int, b: int) -> int:
        return int(self.vadd(np.int64(a), np.int64(b)))

    def sub(self, a: int, b: int) -> int:
        return int(self.vsub(np.int64(a), np.int64(b)))

    def neg(self, a: int) -> int:
        return int(self.vneg(np.int64(a)))

    def mul(self, a: int, b: int) -> int:
        return int(self.vmul(np.int64(a), np.int64(b)))

    def inv(self, a: int) -> int:
        self._check(a)
        if a == 0:
            raise ZeroDivisionError(f"0 n'est pas inversible dans GF({self.q})")
        return int(self._inv_t[a])

    def pow(self, a: int, k: int) -> int:
        self._check(a)
        if k < 0:
            return self.pow(self.inv(a), -k)
        if a == 0:
            return 1 if k == 0 else 0
        return int(self._exp[(int(self._log[a]) * k) % (self.q - 1)])

    def _check(self, a: int) -> None:
        if not 0 <= a < self.q:
            raise ValueError(f"{a} n'est pas un élément de GF({self.q})")

    def elements(self) -> range:
        return range(self.q)

    def nonzero_elements(self) -> range:
        return range(1, self.q)

    def dtype(self):
        return np.uint8 if self.q <= 256 else np.uint16

    def label(self) -> str:
        return f"GF({self.p})" if self.e == 1 else f"GF({self.p}^{self.e})"

    def mult_matrices(self) -> np.ndarray:
        return self._mult_mats


@lru_cache(maxsize=None)
def get_field(p: int, e: int = 1) -> FieldContext:
    """Contexte partagé (les tables ne sont construites qu'une fois)."""
    return FieldContext(p, e)


# ── Matrices denses ───────────────────────────────────────────────────────────


class DenseMatrix:
    """Matrice dense immuable sur un FieldContext, stockée ligne par ligne."""

    __slots__ = ("ctx", "data")

    def __init__(self, ctx: FieldContext, data):
        arr = np.array(data, dtype=np.int64, copy=True)
        if arr.ndim != 2:
            raise ValueError(f"Matrice 2D attendue, reçu ndim={arr.ndim}")
        if arr.size and (arr.min() < 0 or arr.max() >= ctx.q):
            raise ValueError(f"Entrées hors de {ctx.label()}")
        arr = arr.astype(ctx.dtype())
        arr.flags.writeable = False
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "data", arr)

    def __setattr__(self, name, value):
        raise AttributeError("DenseMatrix est immuable")

    @classmethod
    def _wrap(cls, ctx: FieldContext, arr: np.ndarray) -> "DenseMatrix":
        obj = object.__new__(cls)
        arr = np.ascontiguousarray(arr, dtype=ctx.dtype())
        arr.flags.writeable = False
        object.__setattr__(obj, "ctx", ctx)
        object.__setattr__(obj, "data", arr)
        return obj

    @classmethod
    def from_ints(cls, ctx: FieldContext, rows) -> "DenseMatrix":
        """Réduit des entiers modulo p (corps premier uniquement)."""
        if ctx.e != 1:
            raise ValueError("from_ints réservé aux corps premiers")
        arr = np.mod(np.array(rows, dtype=np.int64), ctx.p)
        return cls._wrap(ctx, arr)

    @classmethod
    def from_array(cls, ctx: FieldContext, arr: np.ndarray) -> "DenseMatrix":
        """Adopte un tableau d'entiers déjà réduits (pas de copie int64 intermédiaire)."""
        if arr.ndim != 2:
            raise ValueError(f"Matrice 2D attendue, reçu ndim={arr.ndim}")
        if arr.size and int(arr.max()) >= ctx.q:
            raise ValueError(f"Entrées hors de {ctx.label()}")
        return cls._wrap(ctx, arr)

    @classmethod
    def zeros(cls, ctx: FieldContext, rows: int, cols: int) -> "DenseMatrix":
        return cls._wrap(ctx, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, ctx: FieldContext, n: int) -> "DenseMatrix":
        return cls._wrap(ctx, np.eye(n, dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def entries(self) -> np.ndarray:
        """Entrées en ordre ligne par ligne (vue en lecture seule)."""
        return self.data.reshape(-1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DenseMatrix):
            return NotImplemented
        return self.ctx == other.ctx and np.array_equal(self.data, other.data)

    __hash__ = None

    def __repr__(self) -> str:
        return f"DenseMatrix({self.ctx.label()}, {self.rows}×{self.cols})"

    def _same_field(self, other: "DenseMatrix") -> None:
        if self.ctx != other.ctx:
            raise ValueError(f"Corps différents : {self.ctx.label()} / {other.ctx.label()}")

    def __add__(self, other: "DenseMatrix") -> "DenseMatrix":
        self._same_field(other)
        if self.shape != other.shape:
            raise ValueError(f"Dimensions incompatibles {self.shape} / {other.shape}")
        return DenseMatrix._wrap(self.ctx, self.ctx.vadd(self._i64(), other._i64()))

    def __sub__(self, other: "DenseMatrix") -> "DenseMatrix":
        self._same_field(other)
        if self.shape != other.shape:
            raise ValueError(f"Dimensions incompatibles {self.shape} / {other.shape}")
        return DenseMatrix._wrap(self.ctx, self.ctx.vsub(self._i64(), other._i64()))

    def scale(self, c: int) -> "DenseMatrix":
        return DenseMatrix._wrap(self.ctx, self.ctx.vmul(np.int64(c), self._i64()))

    def transpose(self) -> "DenseMatrix":
        return DenseMatrix._wrap(self.ctx, self.data.T)

    def is_zero(self) -> bool:
        return not self.data.any()

    def _i64(self) -> np.ndarray:
        return self.data.astype(np.int64)

    def __matmul__(self, other: "DenseMatrix") -> "DenseMatrix":
        self._same_field(other)
        if self.cols != other.rows:
            raise ValueError(f"Produit impossible {self.shape} @ {other.shape}")
        ctx = self.ctx
        if ctx.e == 1:
            return DenseMatrix._wrap(ctx, _matmul_mod(self._i64(), other._i64(), ctx.p))
        return DenseMatrix._wrap(ctx, _matmul_ext(self._i64(), other._i64(), ctx))

    def power(self, k: int) -> "DenseMatrix":
        if self.rows != self.cols:
            raise ValueError("Puissance d'une matrice non carrée")
        if k < 0:
            raise ValueError("Exposant négatif")
        if k == 0:
            return DenseMatrix.identity(self.ctx, self.rows)
        result = self
        for _ in range(k - 1):
            result = result @ self
        return result

    def submatrix(self, rows, cols) -> "DenseMatrix":
        return DenseMatrix._wrap(self.ctx, self.data[np.ix_(list(rows), list(cols))])

    def realify(self) -> "DenseMatrix":
        """Matrice sur GF(p) de l'application GF(p)-linéaire sous-jacente.

        rang_GF(p)(realify(M)) = e · rang_GF(p^e)(M).
        """
        ctx = self.ctx
        if ctx.e == 1:
            return self
        blocks = ctx.mult_matrices()[self._i64()]          # (R, C, e, e)
        big = blocks.transpose(0, 2, 1, 3).reshape(self.rows * ctx.e, self.cols * ctx.e)
        return DenseMatrix._wrap(get_field(ctx.p, 1), big)


def _matmul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Produit exact modulo p via BLAS float64 (entrées < p)."""
    inner = a.shape[1]
    if inner * (p - 1) ** 2 >= FLOAT_EXACT:
        # Découpage de la dimension interne pour rester exact
        step = max(1, int(FLOAT_EXACT // ((p - 1) ** 2)) - 1)
        acc = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
        for s in range(0, inner, step):
            acc = (acc + _matmul_mod(a[:, s:s + step], b[s:s + step], p)) % p
        return acc
    prod = a.astype(np.float64) @ b.astype(np.float64)
    return np.mod(prod, p).astype(np.int64)


def _matmul_ext(a: np.ndarray, b: np.ndarray, ctx: FieldContext) -> np.ndarray:
    """Produit dans GF(p^e) par plans de coefficients puis réduction du module."""
    p, e = ctx.p, ctx.e
    ap = [(a // p ** i) % p for i in range(e)]
    bp = [(b // p ** i) % p for i in range(e)]
    planes = [np.zeros((a.shape[0], b.shape[1]), dtype=np.int64) for _ in range(2 * e - 1)]
    for i in range(e):
        for j in range(e):
            planes[i + j] = (planes[i + j] + _matmul_mod(ap[i], bp[j], p)) % p
    m = ctx.modulus
    for k in range(2 * e - 2, e - 1, -1):
        top = planes[k]
        if not top.any():
            continue
        for t in range(e):
            if m[t]:
                planes[k - e + t] = (planes[k - e + t] - m[t] * top) % p
    out = np.zeros_like(planes[0])
    for i in range(e):
        out += planes[i] * p ** i
    return out


# ── Rang ──────────────────────────────────────────────────────────────────────

def rank(M: DenseMatrix) -> int:
    """Rang exact de M sur son corps (M n'est pas modifiée)."""
    return rank_profile(M)[0]


def rank_profile(M: DenseMatrix) -> tuple[int, list[int]]:
    """(rang, colonnes pivots) ; les pivots sont ceux d'une forme échelonnée.

    Pour une extension traitée par réalisation, les pivots ne sont pas
    calculés (liste vide).
    """
    ctx = M.ctx
    if M.rows == 0 or M.cols == 0:
        return 0, []
    if ctx.q == 2:
        return _rank_gf2_packed(M.data)
    if ctx.e == 1:
        return _rank_prime_blocked(M.data, ctx.p)
    if M.rows * M.cols <= TABLE_RANK_ENTRIES:
        return _rank_table(M._i64(), ctx)
    r, _ = rank_profile(M.realify())
    if r % ctx.e:
        raise InternalAssertionError(f"Rang réalisé {r} non divisible par e={ctx.e}")
    return r // ctx.e, []


def rank_generic_path(M: DenseMatrix) -> int:
    """Rang par élimination à un octet par entrée, sans empaquetage (GF(2) compris)."""
    return _rank_table(M._i64(), M.ctx)[0]


def _rank_gf2_packed(bits: np.ndarray) -> tuple[int, list[int]]:
    rows, cols = bits.shape
    words = (cols + 63) // 64
    padded = np.zeros((rows, words * 64), dtype=np.uint8)
    padded[:, :cols] = bits
    packed = np.packbits(padded, axis=1, bitorder="little").view(np.uint64).copy()
    r = 0
    pivots: list[int] = []
    for c in range(cols):
        if r == rows:
            break
        w, b = divmod(c, 64)
        mask = np.uint64(1) << np.uint64(b)
        hits = np.flatnonzero(packed[r:, w] & mask)
        if hits.size == 0:
            continue
        i = r + int(hits[0])
        if i != r:
            packed[[r, i]] = packed[[i, r]]
        below = r + 1 + np.flatnonzero(packed[r + 1:, w] & mask)
        if below.size:
            packed[below, w:] ^= packed[r, w:]
        pivots.append(c)
        r += 1
    return r, pivots


def _rref_rows(C: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Forme échelonnée réduite d'un petit bloc de lignes sur GF(p)."""
    C = C.copy()
    h, w = C.shape
    r = 0
    piv: list[int] = []
    for c in range(w):
        if r == h:
            break
        nz = np.flatnonzero(C[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            C[[r, i]] = C[[i, r]]
        C[r] = (C[r] * pow(int(C[r, c]), p - 2, p)) % p
        col = C[:, c].copy()
        col[r] = 0
        others = np.flatnonzero(col)
        if others.size:
            C[others] = (C[others] - np.outer(col[others], C[r])) % p
        piv.append(c)
        r += 1
    return C[:r], piv


def _rank_prime_blocked(A: np.ndarray, p: int) -> tuple[int, list[int]]:
    """Élimination par blocs de lignes ; base maintenue en forme réduite."""
    nrows, ncols = A.shape
    basis = np.zeros((0, ncols), dtype=np.int64)
    piv_cols: list[int] = []
    for start in range(0, nrows, BLOCK_ROWS):
        if len(piv_cols) == ncols:
            break
        C = A[start:start + BLOCK_ROWS].astype(np.int64) % p
        if basis.shape[0]:
            C = (C - _matmul_mod(C[:, piv_cols], basis, p)) % p
        if not C.any():
            continue
        new_rows, new_piv = _rref_rows(C, p)
        if not new_piv:
            continue
        if basis.shape[0]:
            basis = (basis - _matmul_mod(basis[:, new_piv], new_rows, p)) % p
        basis = np.vstack([basis, new_rows])
        piv_cols.extend(new_piv)
    order = sorted(piv_cols)
    return len(piv_cols), order


def _rank_table(A: np.ndarray, ctx: FieldContext) -> tuple[int, list[int]]:
    A = A.copy()
    h, w = A.shape
    r = 0
    piv: list[int] = []
    for c in range(w):
        if r == h:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        A[r] = ctx.vmul(np.int64(ctx.inv(int(A[r, c]))), A[r])
        below = r + 1 + np.flatnonzero(A[r + 1:, c])
        if below.size:
            factors = A[below, c]
            A[below] = ctx.vsub(A[below], ctx.vmul(factors[:, None], A[r][None, :]))
        piv.append(c)
        r += 1
    return r, piv


def nilpotent_power_rank(N: DenseMatrix, t: int) -> int:
    """Rang de N^t (puissances successives puis rang)."""
    if N.rows != N.cols:
        raise ValueError("nilpotent_power_rank exige une matrice carrée")
    if t < 0:
        raise ValueError("t ≥ 0 attendu")
    if t == 0:
        return N.rows
    P = N
    for _ in range(t - 1):
        P = P @ N
    return rank(P)


def nonsingular_minor(M: DenseMatrix) -> tuple[list[int], list[int]]:
    """Lignes et colonnes d'un mineur inversible de taille rang(M)."""
    r, cols = _rank_table(M._i64(), M.ctx) if M.ctx.e > 1 else rank_profile(M)
    if r == 0:
        return [], []
    sub = M.submatrix(range(M.rows), cols).transpose()
    r2, rows = _rank_table(sub._i64(), sub.ctx) if sub.ctx.e > 1 else rank_profile(sub)
    if r2 != r:
        raise InternalAssertionError("Mineur : rangs incohérents")
    return rows, cols


# ── Polynômes multivariés et rang générique ──────────────────────────────────
#
# Éléments creux de GF(p)[t_0, …, t_{s−1}] (PolyRing de sympy, ordre lex).


@lru_cache(maxsize=None)
def poly_ring(nvars: int, p: int) -> PolyRing:
    """GF(p)[t_0, …, t_{s−1}] ; une variable muette si s = 0."""
    names = ",".join(f"t{i}" for i in range(max(nvars, 1)))
    return PolyRing(names, GF(p), lex)


def poly_const(c: int, nvars: int, p: int) -> PolyElement:
    return poly_ring(nvars, p)(c % p)


def poly_var(i: int, nvars: int, p: int) -> PolyElement:
    if not 0 <= i < nvars:
        raise ValueError(f"Variable t_{i} hors de [0, {nvars})")
    return poly_ring(nvars, p).gens[i]


def poly_degree(f: PolyElement) -> int:
    """Degré total ; −1 pour le polynôme nul."""
    return max((sum(m) for m in f.itermonoms()), default=-1)


def poly_eval(f: PolyElement, point: tuple[int, ...], ctx: FieldContext) -> int:
    """Valeur de f (coefficients dans GF(p)) en un point de GF(p^e)^s."""
    total = 0
    for monom, c in f.iterterms():
        term = int(c) % ctx.p
        for x, a in zip(point, monom):
            if a:
                term = ctx.mul(term, ctx.pow(x, a))
        total = ctx.add(total, term)
    return total


@dataclass(frozen=True)
class PolyMatrix:
    """Matrice de polynômes sur GF(p) en nvars variables t_0, …, t_{s−1}."""

    p: int
    nvars: int
    entries: tuple[tuple[PolyElement, ...], ...]
    degree_cap: int = GENERIC_DEGREE_CAP

    @property
    def ring(self) -> PolyRing:
        return poly_ring(self.nvars, self.p)

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    @classmethod
    def from_linear(cls, p: int, nvars: int, terms, degree_cap: int = GENERIC_DEGREE_CAP):
        """Σ c_i · M_i avec c_i polynôme et M_i matrice d'entiers (listes ou ndarray)."""
        terms = [(coef, np.asarray(mat, dtype=np.int64) % p) for coef, mat in terms]
        if not terms:
            raise ValueError("PolyMatrix.from_linear : aucun terme")
        rows, cols = terms[0][1].shape
        zero = poly_ring(nvars, p).zero
        acc = [[zero] * cols for _ in range(rows)]
        for coef, mat in terms:
            if mat.shape != (rows, cols):
                raise ValueError(f"Dimensions incompatibles {mat.shape} / {(rows, cols)}")
            for i, j in zip(*np.nonzero(mat)):
                acc[i][j] = acc[i][j] + coef * int(mat[i, j])
        return cls(p, nvars, tuple(tuple(r) for r in acc), degree_cap)

    def max_degree(self) -> int:
        return max((poly_degree(f) for row in self.entries for f in row), default=-1)

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.cols != other.rows or self.p != other.p or self.nvars != other.nvars:
            raise ValueError("PolyMatrix : produit incompatible")
        zero = self.ring.zero
        out = []
        for i in range(self.rows):
            row_i = [(k, f) for k, f in enumerate(self.entries[i]) if f]
            new_row = []
            for j in range(other.cols):
                acc = zero
                for k, f in row_i:
                    g = other.entries[k][j]
                    if g:
                        acc = acc + f * g
                if poly_degree(acc) > self.degree_cap:
                    raise DegreeCapExceeded(f"degré {poly_degree(acc)} > {self.degree_cap}")
                new_row.append(acc)
            out.append(tuple(new_row))
        return PolyMatrix(self.p, self.nvars, tuple(out), self.degree_cap)

    def evaluate(self, ctx: FieldContext, point: tuple[int, ...]) -> DenseMatrix:
        if ctx.p != self.p or len(point) != self.nvars:
            raise ValueError("Point d'évaluation incompatible")
        data = [[poly_eval(f, point, ctx) for f in row] for row in self.entries]
        return DenseMatrix(ctx, np.array(data, dtype=np.int64).reshape(self.rows, self.cols))


def generic_rank(M: PolyMatrix) -> int:
    """Rang sur GF(p)(t_0,…,t_{s−1}) par élimination sans division.

    Pivot : entrée non nulle de plus bas degré total (première ligne puis
    première colonne à égalité). La ligne i devient piv·L_i − a_ic·L_piv.
    Lève DegreeCapExceeded dès qu'une entrée dépasse degree_cap.
    """
    cap = M.degree_cap
    zero = M.ring.zero
    work = [list(row) for row in M.entries]
    live_rows = list(range(M.rows))
    live_cols = list(range(M.cols))
    r = 0
    while live_rows and live_cols:
        best = None
        for i in live_rows:
            row = work[i]
            for j in live_cols:
                f = row[j]
                if f:
                    d = poly_degree(f)
                    if best is None or d < best[0]:
                        best = (d, i, j)
                        if d == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        _, pi, pj = best
        piv = work[pi][pj]
        live_rows.remove(pi)
        live_cols.remove(pj)
        r += 1
        prow = work[pi]
        for i in live_rows:
            a = work[i][pj]
            if not a:
                continue
            row = work[i]
            for j in live_cols:
                f = piv * row[j] - a * prow[j] if prow[j] else piv * row[j]
                if poly_degree(f) > cap:
                    raise DegreeCapExceeded(
                        f"élimination : degré {poly_degree(f)} > {cap} (rang partiel {r})"
                    )
                row[j] = f
            row[pj] = zero
    return r
