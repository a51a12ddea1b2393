#!/usr/bin/env python3
"""
complexity_orchestrator.py
==========================
Assemble les variétés par sous-groupe en certificats de complexité de Lie(n).

  c_{S_n}(Lie(n)) = max_E c_E(Lie(n))       (E parcourt les représentants
                                              maximaux de maximal_elem_abelians)
  c_{S_n}(Lie(n)) ≤ m   où p^m | n, p^{m+1} ∤ n

Par sous-groupe E = E' × E_{r_t}[…] :
  - p ∤ n : E fixe le point n, donc E ⊆ S_{n−1} sur lequel Lie(n) est libre ;
    c_E = 0 certifié sans construire de matrice ;
  - p | n : Lie(n) est projectif sur E' (supports dans {1, …, n−1}), d'où
    c_E ≤ r_t ; les points supportés sur les coordonnées de E' doivent être
    hors de la variété (vérifié sur chaque rapport).

Les sous-groupes sont traités en parallèle et réassemblés dans l'ordre de
maximal_elem_abelians : le certificat ne dépend pas de l'ordre d'arrivée.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from lie_config import EXT_MAX, InternalAssertionError, check_module_size
from lie_module import build_representation, restrict
from perm_core import ElemAbelianSubgroup, maximal_elem_abelians, regular_elem_abelian
from variety_engine import DimensionSummary, VarietyReport, run_variety

logger = logging.getLogger(__name__)

SHORTCUT_METHOD = "point-stabilizer"


# ── Certificats ───────────────────────────────────────────────────────────────


@dataclass
class SubgroupResult:
    shape: str
    rank: int
    cap: int | None
    summary: DimensionSummary
    report: VarietyReport | None = None

    def to_json(self) -> dict:
        return {"shape": self.shape, "rank": self.rank, "cap": self.cap,
                "summary": self.summary.to_json()}


@dataclass
class ComplexityCertificate:
    n: int
    p: int
    m: int
    subgroups: list[SubgroupResult] = field(default_factory=list)
    value: int | None = None
    low: int = 0
    high: int = 0
    certified: bool = False
    conjecture: dict | None = None
    consistency: dict | None = None
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "p": self.p,
            "m": self.m,
            "bound": self.m,
            "subgroups": [s.to_json() for s in self.subgroups],
        }
        if self.certified:
            out["value"] = self.value
        else:
            out["bracket"] = [self.low, self.high]
        out["certified"] = self.certified
        if self.conjecture is not None:
            out["conjecture"] = self.conjecture
        if self.consistency is not None:
            out["consistency"] = self.consistency
        out["notes"] = list(self.notes)
        return out


# ── Opérations ────────────────────────────────────────────────────────────────

def valuation_bound(n: int, p: int) -> int:
    """Plus grand m avec p^m | n."""
    if n < 1:
        raise ValueError(f"n ≥ 1 attendu (n={n})")
    if p < 2:
        raise ValueError(f"p premier attendu (p={p})")
    m = 0
    while n % p == 0:
        n //= p
        m += 1
    return m


def _projective_part_check(report: VarietyReport, E: ElemAbelianSubgroup) -> None:
    """Points supportés sur les coordonnées de E' : hors de la variété."""
    head = E.factor_slices()[-1].start
    if head == 0:
        return
    for rec in report.points:
        if any(rec.alpha[head:]):
            continue
        if rec.member:
            raise InternalAssertionError(
                f"Lie({report.n}) non projectif sur E' au point α={rec.alpha} (forme {report.shape})"
            )


def subgroup_complexity(n: int, p: int, E: ElemAbelianSubgroup, *, mode: str = "full",
                        e_max: int = EXT_MAX, cache_dir: Path | None = None,
                        threads: int = 1, force: bool = False,
                        progress: bool = False) -> SubgroupResult:
    """c_E(Lie(n)) : raccourci si p ∤ n, sinon pipeline complet avec la borne r_t."""
    label = E.shape.label()
    if n % p:
        logger.info("Lie(%d), E=%s : p ∤ n, c_E = 0 sans calcul matriciel", n, label)
        summary = DimensionSummary.certified_value(0, SHORTCUT_METHOD)
        report = VarietyReport(n, p, label, E.rank, math.factorial(n - 1), mode,
                               dimension=summary,
                               notes=[f"p ∤ n : E fixe le point {n}, Lie({n}) est libre sur E"])
        return SubgroupResult(label, E.rank, 0, summary, report)
    cap = E.shape.parts[-1]
    rep = build_representation(n, p, E.generators, cache_dir=cache_dir,
                               threads=threads, force=force)
    mats = restrict(rep, E, force=force)
    report = run_variety(mats, p, n=n, shape_label=label, mode=mode, e_max=e_max,
                         threads=threads, cap=cap, progress=progress)
    _projective_part_check(report, E)
    logger.info("Lie(%d), E=%s : %s", n, label, report.dimension.to_json())
    return SubgroupResult(label, E.rank, cap, report.dimension, report)


def _needs_matrices(n: int, p: int) -> bool:
    return n % p == 0


def assemble(n: int, p: int, *, e_max: int = EXT_MAX, cache_dir: Path | None = None,
             threads: int = 1, force: bool = False,
             progress: bool = False) -> ComplexityCertificate:
    """Maximum des c_E sur les représentants ; encadrement si une synthèse est heuristique."""
    m = valuation_bound(n, p)
    if _needs_matrices(n, p):
        check_module_size(n, p, force=force)
    cert = ComplexityCertificate(n, p, m)
    subgroups = maximal_elem_abelians(n, p)
    if not subgroups:
        cert.value, cert.low, cert.high, cert.certified = 0, 0, 0, True
        cert.notes.append(f"aucun p-sous-groupe non trivial (n < p) : Lie({n}) projectif")
        return cert

    # Un seul niveau de parallélisme : les sous-groupes se partagent le pool.
    inner = 1 if threads > 1 and len(subgroups) > 1 else threads
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        results = list(pool.map(
            lambda E: subgroup_complexity(n, p, E, e_max=e_max, cache_dir=cache_dir,
                                          threads=inner, force=force, progress=progress),
            subgroups,
        ))
    cert.subgroups = results
    cert.low = max(r.summary.low for r in results)
    cert.high = max(r.summary.high for r in results)
    if cert.high > m:
        raise InternalAssertionError(
            f"Borne de valuation violée : c(Lie({n})) ≤ {cert.high} annoncé mais m = {m}"
        )
    if cert.low == cert.high:
        cert.value = cert.low
        cert.certified = True
    else:
        cert.notes.append(
            "encadrement : au moins une synthèse par sous-groupe n'est pas certifiée"
        )
    if m >= 1 and n == p ** m:
        # Égalité c = m attendue pour n = p^m
        if cert.certified:
            holds = cert.value == m
        else:
            holds = False if cert.high < m else None
        cert.conjecture = {"statement": f"c(Lie({n})) = {m}", "holds": holds}
    logger.info("Lie(%d) à p=%d : %s (borne m=%d)", n, p,
                cert.value if cert.certified else [cert.low, cert.high], m)
    return cert


def conjecture_check(m: int, p: int, *, e_max: int = EXT_MAX, cache_dir: Path | None = None,
                     threads: int = 1, force: bool = False, progress: bool = False) -> dict:
    """V^#_{E_m}(Lie(p^m)) = F^m : "certified-true", "certified-false" ou "evidence-only"."""
    if m < 1:
        raise ValueError(f"m ≥ 1 attendu (m={m})")
    n = p ** m
    check_module_size(n, p, force=force)
    E = regular_elem_abelian(m, p)
    rep = build_representation(n, p, E.generators, cache_dir=cache_dir,
                               threads=threads, force=force)
    report = run_variety(restrict(rep, E), p, n=n, shape_label=E.shape.label(),
                         mode="full", e_max=e_max, threads=threads, progress=progress)
    dim = report.dimension
    if dim.certified and dim.value == m:
        verdict = "certified-true"
    elif any(g.outcome == "non-member" and g.method == "witness" for g in report.generic):
        verdict = "certified-false"
    else:
        verdict = "evidence-only"
    logger.info("Lie(%d) sur E_%d : %s", n, m, verdict)
    return {"m": m, "p": p, "n": n, "verdict": verdict, "dimension": dim.to_json(),
            "report": report.to_json()}


def p_power_consistency(n: int, p: int, *, e_max: int = EXT_MAX,
                        cache_dir: Path | None = None, threads: int = 1,
                        force: bool = False, progress: bool = False) -> dict:
    """Compare c(Lie(n)) à max_i c(Lie(p^i)), 1 ≤ i ≤ m, pour n = p^m k."""
    m = valuation_bound(n, p)
    k = n // p ** m
    if m == 0 or k == 1:
        raise ValueError(f"n = p^m·k avec m ≥ 1 et k > 1 attendu (n={n}, p={p})")
    for size in [n] + [p ** i for i in range(1, m + 1)]:
        check_module_size(size, p, force=force)
    opts = dict(e_max=e_max, cache_dir=cache_dir, threads=threads, force=force,
                progress=progress)
    main = assemble(n, p, **opts)
    parts = {p ** i: assemble(p ** i, p, **opts) for i in range(1, m + 1)}
    record = {
        "n": n, "p": p, "m": m, "k": k,
        "value": main.value if main.certified else None,
        "bracket": [main.low, main.high],
        "powers": {str(size): (c.value if c.certified else [c.low, c.high])
                   for size, c in parts.items()},
    }
    if main.certified and all(c.certified for c in parts.values()):
        expected = max(c.value for c in parts.values())
        record["expected"] = expected
        record["consistent"] = expected == main.value
        if not record["consistent"]:
            logger.error("Incohérence p-puissance : c(Lie(%d)) = %d, max = %d",
                         n, main.value, expected)
    else:
        record["expected"] = None
        record["consistent"] = None
    return record
