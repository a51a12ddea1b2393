#!/usr/bin/env python3
"""
lie_module.py
=============
Modèle matriciel de Lie(n) = F_p S_n ω_n, de dimension (n−1)!.

  - base {σ ω_n : σ ∈ S_{n,1}}, σ(1) = 1, ordre lexicographique de
    (σ(2), …, σ(n)) ;
  - matrice d'action de g : la colonne σ contient les coordonnées de
    straighten(g σ) (action à gauche, M(g) M(h) = M(gh)) ;
  - oracles dans le module régulier F_p S_n (n ≤ 7) ;
  - cache binaire LIEM des matrices de générateurs.

Format LIEM (un enregistrement par matrice, concaténés)
-------------------------------------------------------
  b"LIEM" | version (1 octet) | p, e, n (<i4) | rows, cols (<q8) | entrées
  ligne par ligne, un octet chacune (e = 1 uniquement).
  Fichier : lie_n{n}_p{p}_g{k}_{sha1[:12]}.liem, écrit dans un fichier
  temporaire puis renommé (os.replace).
"""

from __future__ import annotations

import hashlib
import itertools
import logging
import math
import os
import struct
import tempfile
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from exact_linalg import DenseMatrix, get_field, rank
from group_algebra import dsw_element, straighten_images
from lie_config import VERIFY_MAX_N, ResourceLimitError, check_module_size
from perm_core import ElemAbelianSubgroup, Permutation, compose, from_cycles, identity

logger = logging.getLogger(__name__)

# ── Configuration ─────────────────────────────────────────────────────────────

LIEM_MAGIC   = b"LIEM"
LIEM_VERSION = 1
_HEADER      = struct.Struct("<4sBiiiqq")


# ── Erreurs du cache ──────────────────────────────────────────────────────────

class CacheFormatError(ValueError):
    """Fichier LIEM illisible ou incompatible."""


class CacheMagicError(CacheFormatError):
    pass


class CacheVersionError(CacheFormatError):
    pass


class CacheTruncatedError(CacheFormatError):
    pass


class CacheMismatchError(CacheFormatError):
    """En-tête valide mais p, n ou dimensions différents de ceux attendus."""


# ── Compteur de constructions ─────────────────────────────────────────────────


class _BuildCounter:
    def __init__(self):
        self._lock = threading.Lock()
        self._count = 0

    def increment(self) -> None:
        with self._lock:
            self._count += 1

    def value(self) -> int:
        with self._lock:
            return self._count

    def reset(self) -> None:
        with self._lock:
            self._count = 0


BUILD_COUNTER = _BuildCounter()


def matrix_builds() -> int:
    """Nombre de matrices d'action construites depuis le démarrage (ou reset)."""
    return BUILD_COUNTER.value()


# ── Base ──────────────────────────────────────────────────────────────────────


class LieBasis:
    """Les (n−1)! permutations σ ∈ S_{n,1}, avec rang / dérang."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError(f"Lie(n) exige n ≥ 1 (n={n})")
        self.n = n
        self.elements: tuple[tuple[int, ...], ...] = tuple(
            (1,) + tail for tail in itertools.permutations(range(2, n + 1))
        )
        self._index = {images: i for i, images in enumerate(self.elements)}

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def dim(self) -> int:
        return len(self.elements)

    def rank(self, sigma: Permutation | tuple[int, ...]) -> int:
        images = sigma.images if isinstance(sigma, Permutation) else tuple(sigma)
        try:
            return self._index[images]
        except KeyError:
            raise ValueError(f"{images} n'est pas dans S_{{{self.n},1}}") from None

    def unrank(self, i: int) -> Permutation:
        return Permutation._trusted(self.elements[i])


@lru_cache(maxsize=None)
def get_basis(n: int) -> LieBasis:
    return LieBasis(n)


# ── Matrices d'action ─────────────────────────────────────────────────────────

def action_matrix(g: Permutation, n: int, p: int, force: bool = False) -> DenseMatrix:
    """Matrice (n−1)!×(n−1)! de g sur Lie(n) dans la base {σ ω_n}."""
    if g.degree != n:
        raise ValueError(f"g de degré {g.degree}, attendu {n}")
    check_module_size(n, p, force=force)
    basis = get_basis(n)
    dim = basis.dim
    index = basis._index
    gi = g.images
    data = np.zeros((dim, dim), dtype=np.uint8)
    for j, sigma in enumerate(basis.elements):
        rho = tuple(gi[x - 1] for x in sigma)
        for images, c in straighten_images(rho, p).items():
            data[index[images], j] = c
    BUILD_COUNTER.increment()
    logger.debug("Matrice d'action de %s sur Lie(%d) construite (p=%d)", g, n, p)
    return DenseMatrix.from_array(get_field(p), data)


def _regular_vector(x: dict[tuple[int, ...], int], positions: dict, size: int) -> np.ndarray:
    row = np.zeros(size, dtype=np.uint8)
    for images, c in x.items():
        row[positions[images]] = c
    return row


def _times_omega(g: tuple[int, ...], omega_terms, p: int) -> dict[tuple[int, ...], int]:
    acc: dict[tuple[int, ...], int] = {}
    for tau, c in omega_terms:
        key = tuple(g[x - 1] for x in tau)
        acc[key] = (acc.get(key, 0) + c) % p
    return acc


def oracle_action_matrix(g: Permutation, n: int, p: int) -> DenseMatrix:
    """Même matrice que action_matrix, par multiplication dans le module régulier.

    Le seul élément du support de ω_n qui fixe 1 est l'identité (coefficient 1) :
    la coordonnée de v ∈ Lie(n) sur σ ω_n est donc le coefficient de v en σ.
    """
    if n > VERIFY_MAX_N:
        raise ResourceLimitError(f"Oracle régulier limité à n ≤ {VERIFY_MAX_N} (n={n})")
    basis = get_basis(n)
    omega = dsw_element(n, p).terms
    gi = g.images
    data = np.zeros((basis.dim, basis.dim), dtype=np.uint8)
    for j, sigma in enumerate(basis.elements):
        g_sigma = tuple(gi[x - 1] for x in sigma)
        vec = _times_omega(g_sigma, omega, p)
        for images, c in vec.items():
            if c and images[0] == 1:
                data[basis.rank(images), j] = c
    return DenseMatrix.from_array(get_field(p), data)


def _regular_rank(vectors: list[dict], n: int, p: int) -> int:
    perms = list(itertools.permutations(range(1, n + 1)))
    positions = {images: i for i, images in enumerate(perms)}
    data = np.stack([_regular_vector(v, positions, len(perms)) for v in vectors])
    return rank(DenseMatrix.from_array(get_field(p), data))


def verify_dimension(n: int, p: int) -> bool:
    """rang de {σ ω_n : σ ∈ S_n} dans F_p S_n = (n−1)!."""
    if n > VERIFY_MAX_N:
        raise ResourceLimitError(f"Oracle régulier limité à n ≤ {VERIFY_MAX_N} (n={n})")
    omega = dsw_element(n, p).terms
    vectors = [_times_omega(sigma, omega, p)
               for sigma in itertools.permutations(range(1, n + 1))]
    r = _regular_rank(vectors, n, p)
    logger.info("Lie(%d) sur GF(%d) : rang %d dans le module régulier", n, p, r)
    return r == math.factorial(n - 1)


def verify_free_over_point_stabilizer(n: int, p: int) -> bool:
    """{y (1,n) ω_n : y ∈ S_{n−1}} est libre dans F_p S_n."""
    if n > VERIFY_MAX_N:
        raise ResourceLimitError(f"Oracle régulier limité à n ≤ {VERIFY_MAX_N} (n={n})")
    omega = dsw_element(n, p).terms
    swap = from_cycles([(1, n)], n) if n > 1 else identity(1)
    vectors = []
    for y in itertools.permutations(range(1, n)):
        y_images = y + (n,)
        vectors.append(_times_omega(compose(Permutation._trusted(y_images), swap).images,
                                    omega, p))
    return _regular_rank(vectors, n, p) == math.factorial(n - 1)


# ── Représentations ───────────────────────────────────────────────────────────


@dataclass(frozen=True)
class LieRepresentation:
    """Matrices des générateurs sur Lie(n) et provenance ("built" / "cache")."""

    n: int
    p: int
    generators: tuple[Permutation, ...]
    matrices: tuple[DenseMatrix, ...]
    provenance: str = "built"

    @property
    def dim(self) -> int:
        return math.factorial(self.n - 1)

    def matrix_of(self, g: Permutation) -> DenseMatrix:
        for gen, mat in zip(self.generators, self.matrices):
            if gen == g:
                return mat
        raise KeyError(f"{g} n'est pas un générateur de la représentation")


def build_representation(n: int, p: int, generators, cache_dir: Path | None = None,
                         threads: int = 1, force: bool = False) -> LieRepresentation:
    """Construit (ou recharge depuis le cache) les matrices des générateurs."""
    generators = tuple(generators)
    for g in generators:
        if g.degree != n:
            raise ValueError(f"Générateur {g} de degré {g.degree}, attendu {n}")
    check_module_size(n, p, force=force)
    if cache_dir is not None:
        path = cache_path(cache_dir, n, p, generators)
        if path.exists():
            rep = cache_load(path, n, p, generators)
            logger.info("Cache LIEM : %s (%d matrices)", path.name, len(rep.matrices))
            return rep
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        mats = tuple(pool.map(lambda g: action_matrix(g, n, p, force=force), generators))
    rep = LieRepresentation(n, p, generators, mats, "built")
    logger.info("Lie(%d) sur GF(%d) : %d matrices %d×%d construites",
                n, p, len(mats), rep.dim, rep.dim)
    if cache_dir is not None:
        cache_store(rep, cache_dir)
    return rep


def restrict(rep: LieRepresentation, E: ElemAbelianSubgroup, force: bool = False) -> list[DenseMatrix]:
    """Une matrice par générateur de E, dans l'ordre des générateurs de E."""
    out = []
    for g in E.generators:
        if g.degree != rep.n:
            raise ValueError(f"Générateur {g} de degré {g.degree}, attendu {rep.n}")
        try:
            out.append(rep.matrix_of(g))
        except KeyError:
            out.append(action_matrix(g, rep.n, rep.p, force=force))
    return out


# ── Cache LIEM ────────────────────────────────────────────────────────────────

def cache_path(cache_dir: Path, n: int, p: int, generators) -> Path:
    key = ";".join(g.to_cycles() for g in generators)
    digest = hashlib.sha1(f"{n}|{p}|{key}".encode()).hexdigest()[:12]
    return Path(cache_dir) / f"lie_n{n}_p{p}_g{len(generators)}_{digest}.liem"


def encode_liem(p: int, n: int, matrices) -> bytes:
    chunks = []
    for m in matrices:
        if m.ctx.e != 1:
            raise ValueError("Seules les matrices sur le corps premier sont mises en cache")
        chunks.append(_HEADER.pack(LIEM_MAGIC, LIEM_VERSION, p, 1, n, m.rows, m.cols))
        chunks.append(m.data.astype(np.uint8).tobytes(order="C"))
    return b"".join(chunks)


def decode_liem(blob: bytes) -> tuple[int, int, list[np.ndarray]]:
    """(p, n, matrices) ; lève une sous-classe de CacheFormatError si invalide."""
    pos = 0
    p_seen = n_seen = None
    out = []
    if not blob:
        raise CacheTruncatedError("Fichier LIEM vide")
    while pos < len(blob):
        remaining = len(blob) - pos
        if remaining < _HEADER.size:
            head = min(remaining, len(LIEM_MAGIC))
            if blob[pos:pos + head] != LIEM_MAGIC[:head]:
                raise CacheMagicError("Signature LIEM absente")
            raise CacheTruncatedError(f"En-tête tronqué à l'octet {pos}")
        magic, version, p, e, n, rows, cols = _HEADER.unpack_from(blob, pos)
        if magic != LIEM_MAGIC:
            raise CacheMagicError(f"Signature {magic!r} ≠ {LIEM_MAGIC!r}")
        if version != LIEM_VERSION:
            raise CacheVersionError(f"Version {version} non supportée (attendu {LIEM_VERSION})")
        if e != 1:
            raise CacheMismatchError(f"Extension e={e} dans un cache (seul e=1 est permis)")
        if rows < 0 or cols < 0:
            raise CacheMismatchError(f"Dimensions négatives {rows}×{cols}")
        if p_seen is not None and (p, n) != (p_seen, n_seen):
            raise CacheMismatchError("Enregistrements de (p, n) différents dans un même fichier")
        p_seen, n_seen = p, n
        pos += _HEADER.size
        size = rows * cols
        if len(blob) - pos < size:
            raise CacheTruncatedError(f"Données tronquées : {len(blob) - pos} < {size} octets")
        arr = np.frombuffer(blob, dtype=np.uint8, count=size, offset=pos).reshape(rows, cols)
        out.append(arr.copy())
        pos += size
    return p_seen, n_seen, out


def cache_store(rep: LieRepresentation, cache_dir: Path) -> Path:
    """Écriture atomique (fichier temporaire puis os.replace)."""
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    path = cache_path(cache_dir, rep.n, rep.p, rep.generators)
    blob = encode_liem(rep.p, rep.n, rep.matrices)
    fd, tmp = tempfile.mkstemp(dir=cache_dir, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(blob)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.info("Cache LIEM écrit : %s (%d octets)", path.name, len(blob))
    return path


def cache_load(path: Path, n: int, p: int, generators) -> LieRepresentation:
    """Relit un cache et vérifie p, n, le nombre et la taille des matrices."""
    generators = tuple(generators)
    p_file, n_file, arrays = decode_liem(Path(path).read_bytes())
    if (p_file, n_file) != (p, n):
        raise CacheMismatchError(f"Cache pour (n={n_file}, p={p_file}), attendu (n={n}, p={p})")
    if len(arrays) != len(generators):
        raise CacheMismatchError(f"{len(arrays)} matrices en cache, {len(generators)} attendues")
    dim = math.factorial(n - 1)
    ctx = get_field(p)
    mats = []
    for arr in arrays:
        if arr.shape != (dim, dim):
            raise CacheMismatchError(f"Matrice {arr.shape} en cache, attendu {dim}×{dim}")
        if arr.size and int(arr.max()) >= p:
            raise CacheMismatchError(f"Entrée hors de GF({p}) en cache")
        mats.append(DenseMatrix.from_array(ctx, arr))
    return LieRepresentation(n, p, generators, tuple(mats), "cache")


def list_cache(cache_dir: Path) -> list[Path]:
    cache_dir = Path(cache_dir)
    if not cache_dir.exists():
        return []
    return sorted(cache_dir.glob("lie_n*_p*_g*_*.liem"))


def clear_cache(cache_dir: Path) -> int:
    removed = 0
    for path in list_cache(cache_dir):
        path.unlink()
        removed += 1
    return removed
