#!/usr/bin/env python3
"""
lie_config.py
=============
Configuration commune du moteur Lie(n) : chemins, bornes de ressources,
chargement du fichier .env et types d'erreurs partagés entre modules.

Toutes les valeurs peuvent être surchargées par variable d'environnement
(ou par le fichier .env placé à côté du code) :

  LIE_CACHE_DIR        répertoire des caches LIEM          (défaut : ./lie_cache)
  LIE_DB_PATH          base SQLite des certificats          (défaut : ./lie_results.db)
  LIE_THREADS          nombre de workers                    (défaut : 1)
  LIE_LOG_LEVEL        niveau de log du CLI                 (défaut : INFO)
  LIE_EXT_MAX          degré d'extension max des scans      (défaut : 2)
  LIE_DSW_MAX_DEGREE   borne sur n pour ω_n                 (défaut : 12)
"""

from __future__ import annotations

import math
import os
from pathlib import Path

import psutil

# ── Chargement .env ────────────────────────────────────────────────────────────

ENV_PATH = Path(__file__).parent / ".env"


def _load_env(path: Path) -> dict:
    env = {}
    if not path.exists():
        return env
    for line in path.read_text().splitlines():
        line = line.strip()
        if line and not line.startswith("#") and "=" in line:
            k, _, v = line.partition("=")
            env[k.strip()] = v.strip().strip('"').strip("'")
    return env


_env = _load_env(ENV_PATH)


def _get(key: str, default: str = "") -> str:
    return os.environ.get(key) or _env.get(key) or default


# ── Configuration ─────────────────────────────────────────────────────────────

CACHE_DIR   = Path(_get("LIE_CACHE_DIR", str(Path(__file__).parent / "lie_cache")))
DB_PATH     = Path(_get("LIE_DB_PATH", str(Path(__file__).parent / "lie_results.db")))
THREADS     = int(_get("LIE_THREADS", "1"))
LOG_LEVEL   = _get("LIE_LOG_LEVEL", "INFO").upper()
EXT_MAX     = int(_get("LIE_EXT_MAX", "2"))      # scans sur GF(p), GF(p²)
EXT_LIMIT   = 4                                   # plafond absolu (--ext)

DSW_MAX_DEGREE = int(_get("LIE_DSW_MAX_DEGREE", "12"))

# Bornes « bureau » sur n pour construire Lie(n) ; au-delà : --force
DESK_N_LIMIT = {2: 8}
DESK_N_DEFAULT = 7

# Modules de dimension > STRETCH_DIM (Lie(8), Lie(9)) : --force obligatoire
STRETCH_DIM = 720

SCAN_POINT_BUDGET   = 4096   # points projectifs par scan
GROUP_ORDER_BUDGET  = 512    # |E| max pour sigma_rank
GENERIC_DEGREE_CAP  = 64     # degré total max par entrée (élimination symbolique)
SYMBOLIC_MAX_DIM    = 128    # au-delà, pas de tentative symbolique

VERIFY_MAX_N = 7             # oracles dans le module régulier (n! colonnes)

# Marge mémoire : on refuse un run forcé qui dépasserait cette fraction
MEMORY_FRACTION = 0.8


# ── Erreurs partagées ─────────────────────────────────────────────────────────

class ResourceLimitError(RuntimeError):
    """Calcul refusé : une borne de ressources serait dépassée."""


class InternalAssertionError(AssertionError):
    """Un invariant mathématique a été violé numériquement (bug bloquant)."""


# ── Politique de ressources ───────────────────────────────────────────────────

def desk_limit(p: int) -> int:
    return DESK_N_LIMIT.get(p, DESK_N_DEFAULT)


def estimate_memory_bytes(dim: int, e_max: int = 1) -> int:
    """Mémoire de travail approximative d'un run sur un module de dimension dim.

    Une matrice d'action (1 octet/entrée) par générateur, une copie réalisée
    sur GF(p) de taille (e·dim)² en float64 pour l'élimination par blocs.
    """
    per_matrix = dim * dim
    realified = (e_max * dim) ** 2 * 8
    return 6 * per_matrix + 2 * realified


def check_module_size(n: int, p: int, force: bool = False, e_max: int = 1) -> None:
    """Applique la politique de ressources avant de construire Lie(n).

    Lève ResourceLimitError en nommant la borne franchie et le coût estimé.
    """
    dim = math.factorial(n - 1)
    limit = desk_limit(p)
    if not force:
        if n > limit:
            raise ResourceLimitError(
                f"n={n} dépasse la borne bureau n ≤ {limit} pour p={p} "
                f"(Lie({n}) : dimension {dim}, rangs denses {dim}×{dim} sur GF({p})) ; "
                f"relancer avec --force"
            )
        if dim > STRETCH_DIM:
            raise ResourceLimitError(
                f"Lie({n}) est de dimension {dim} > {STRETCH_DIM} (run « stretch », "
                f"~{estimate_memory_bytes(dim, e_max) / 2**30:.1f} Gio de travail) ; "
                f"relancer avec --force"
            )
        return
    needed = estimate_memory_bytes(dim, e_max)
    available = psutil.virtual_memory().available
    if needed > MEMORY_FRACTION * available:
        raise ResourceLimitError(
            f"Lie({n}) à p={p} demande ~{needed / 2**30:.1f} Gio, "
            f"{available / 2**30:.1f} Gio disponibles, même avec --force"
        )
