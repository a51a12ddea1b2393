#!/usr/bin/env python3
"""
variety_engine.py
=================
Variétés de rang V^#_E(M) d'un module M sur un p-groupe abélien élémentaire
E = ⟨g_1, …, g_k⟩ donné par les matrices A_i des générateurs.

  u_α − 1 = N = Σ α_i (A_i − I),   N^p = 0
  α ∈ V^#  ⇔  M n'est pas libre sur F⟨u_α⟩
           ⇔  p ∤ dim  ou  rang(N^{p−1}) < dim/p

Outils
------
  scan               : tous les points projectifs de GF(p^e)^k (représentants
                       normalisés, premier coefficient non nul = 1)
  sigma_rank         : rang de σ_E = Σ_{g∈E} g = Π (A_i − I)^{p−1} ; nombre de
                       facteurs libres et dimension de la partie non projective
  generic_membership : décision exacte au point générique d'une carte α_j = 1
  dimension_summary  : dimension certifiée, ou encadrement + estimation
                       heuristique clairement étiquetée

Méthodes de certification (champ "method" des rapports)
--------------------------------------------------------
  dimension          p ∤ dim : tout point est dans la variété
  sigma-free         dim(M^pf) = 0 : M projectif, V = {0}
  point              k = 1 : la carte se réduit au point α = (1)
  witness            un point où rang(N^{p−1}) = dim/p : carte génériquement hors V
  exhaustive         tous les points de la carte sur GF(q) dans V et
                     q > (d/p)(p−1), d = dim(M^pf) si σ_E est connu, dim sinon :
                     les mineurs s'annulent identiquement
  symbolic           rang générique de N(t)^{p−1} par élimination sans division
  bracket            bornes inférieure et supérieure égales

Usage:
  rapport = run_variety(matrices, p=2, n=4, shape_label="2", mode="full")
  print(json.dumps(rapport.to_json()))
"""

from __future__ import annotations

import itertools
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from tqdm import tqdm

from exact_linalg import (
    DegreeCapExceeded,
    DenseMatrix,
    FieldContext,
    PolyMatrix,
    generic_rank,
    get_field,
    nonsingular_minor,
    poly_const,
    poly_var,
    rank,
)
from lie_config import (
    EXT_LIMIT,
    EXT_MAX,
    GENERIC_DEGREE_CAP,
    GROUP_ORDER_BUDGET,
    SCAN_POINT_BUDGET,
    SYMBOLIC_MAX_DIM,
    InternalAssertionError,
    ResourceLimitError,
)

logger = logging.getLogger(__name__)

# ── Configuration ─────────────────────────────────────────────────────────────

NILPOTENT_CHECK_DIM = 720     # N^p = 0 vérifié explicitement jusqu'à cette dimension
MINOR_CHECK_DIM     = 720     # contrôle du mineur témoin (corps premier)
MINOR_SPOT_CHECKS   = 8

MODES = ("point", "scan", "generic", "sigma", "full")


# ── Types ─────────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class ShiftedUnitPoint:
    """α ∈ GF(p^e)^k non nul ; normalized : premier coefficient non nul = 1."""

    alpha: tuple[int, ...]
    e: int = 1
    normalized: bool = False

    def __post_init__(self):
        if not any(self.alpha):
            raise ValueError("α = 0 n'est pas un point de test (0 ∈ V^# par définition)")

    @classmethod
    def normalize(cls, alpha, ctx: FieldContext) -> "ShiftedUnitPoint":
        alpha = tuple(int(a) for a in alpha)
        for a in alpha:
            if not 0 <= a < ctx.q:
                raise ValueError(f"{a} n'est pas un élément de {ctx.label()}")
        lead = next((a for a in alpha if a), 0)
        if not lead:
            raise ValueError("α = 0 n'est pas un point de test (0 ∈ V^# par définition)")
        inv = ctx.inv(lead)
        return cls(tuple(ctx.mul(inv, a) for a in alpha), ctx.e, True)


@dataclass(frozen=True)
class PointRecord:
    alpha: tuple[int, ...]
    e: int
    rank: int
    member: bool

    def to_json(self) -> dict:
        return {"alpha": list(self.alpha), "e": self.e, "rank": self.rank, "member": self.member}


@dataclass(frozen=True)
class SigmaSummary:
    free_count: int
    pf_dim: int
    group_order: int

    def to_json(self) -> dict:
        return {"free_count": self.free_count, "pf_dim": self.pf_dim}


@dataclass(frozen=True)
class GenericOutcome:
    chart: int
    outcome: str                  # "member" | "non-member" | "aborted"
    method: str
    witness: tuple[int, ...] | None = None
    witness_e: int | None = None

    @property
    def member_generic(self) -> bool | None:
        if self.outcome == "aborted":
            return None
        return self.outcome == "member"

    def to_json(self) -> dict:
        out = {"chart": self.chart, "outcome": self.outcome, "method": self.method}
        if self.witness is not None:
            out["witness"] = {"alpha": list(self.witness), "e": self.witness_e}
        return out


@dataclass(frozen=True)
class DimensionSummary:
    value: int | None
    certified: bool
    method: str
    low: int
    high: int
    estimate: int | None = None
    heuristic: bool = False

    def to_json(self) -> dict:
        return {
            "value": self.value, "certified": self.certified, "method": self.method,
            "low": self.low, "high": self.high,
            "estimate": self.estimate, "heuristic": self.heuristic,
        }

    @classmethod
    def certified_value(cls, value: int, method: str) -> "DimensionSummary":
        return cls(value, True, method, value, value)


@dataclass
class VarietyReport:
    n: int
    p: int
    shape: str
    k: int
    dim: int
    mode: str
    points: list[PointRecord] = field(default_factory=list)
    sigma: SigmaSummary | None = None
    generic: list[GenericOutcome] = field(default_factory=list)
    dimension: DimensionSummary | None = None
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "shape": self.shape,
            "rank": self.k,
            "dim": self.dim,
            "mode": self.mode,
            "points": [r.to_json() for r in self.points],
            "sigma": self.sigma.to_json() if self.sigma else None,
            "generic": [g.to_json() for g in self.generic],
            "dimension": self.dimension.to_json() if self.dimension else None,
            "notes": list(self.notes),
        }


# ── Point de test ─────────────────────────────────────────────────────────────

def _check_generators(gen_matrices) -> int:
    if not gen_matrices:
        raise ValueError("Aucune matrice de générateur")
    dim = gen_matrices[0].rows
    for A in gen_matrices:
        if A.rows != A.cols or A.rows != dim:
            raise ValueError(f"Matrices de générateurs incompatibles : {A.shape} / {dim}×{dim}")
        if A.ctx.e != 1 or A.ctx.p != gen_matrices[0].ctx.p:
            raise ValueError("Les matrices de générateurs doivent être sur le même corps premier")
    return dim


def u_alpha_minus_one(gen_matrices, alpha, ctx: FieldContext | None = None) -> DenseMatrix:
    """N = Σ α_i (A_i − I) sur le corps ctx (défaut : corps des matrices)."""
    dim = _check_generators(gen_matrices)
    base = gen_matrices[0].ctx
    ctx = ctx or base
    if ctx.p != base.p:
        raise ValueError(f"α dans {ctx.label()} incompatible avec GF({base.p})")
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != len(gen_matrices):
        raise ValueError(f"α de longueur {len(alpha)}, {len(gen_matrices)} générateurs")
    eye = np.eye(dim, dtype=np.int64)
    acc = np.zeros((dim, dim), dtype=np.int64)
    for a, A in zip(alpha, gen_matrices):
        if not 0 <= a < ctx.q:
            raise ValueError(f"{a} n'est pas un élément de {ctx.label()}")
        if not a:
            continue
        D = (A.data.astype(np.int64) - eye) % base.p
        acc = ctx.vadd(acc, ctx.vmul(np.int64(a), D))
    return DenseMatrix.from_array(ctx, acc)


def evaluate_point(gen_matrices, alpha, ctx: FieldContext) -> PointRecord:
    """Teste un point et vérifie les deux critères de liberté l'un contre l'autre."""
    p = ctx.p
    N = u_alpha_minus_one(gen_matrices, alpha, ctx)
    dim = N.rows
    P = N.power(p - 1)
    r_top = rank(P)
    r_n = r_top if p == 2 else rank(N)
    if dim <= NILPOTENT_CHECK_DIM and not (P @ N).is_zero():
        raise InternalAssertionError(f"N^p ≠ 0 en α={tuple(alpha)} sur {ctx.label()}")
    if r_n * p > dim * (p - 1):
        raise InternalAssertionError(
            f"rang(N)={r_n} > dim(p−1)/p en α={tuple(alpha)} (dim={dim}, p={p})"
        )
    divisible = dim % p == 0
    free = divisible and r_top == dim // p
    if divisible and free != (r_n == dim * (p - 1) // p):
        raise InternalAssertionError(
            f"Critères de liberté en désaccord en α={tuple(alpha)} : "
            f"rang(N^{p - 1})={r_top}, rang(N)={r_n}, dim={dim}"
        )
    return PointRecord(tuple(int(a) for a in alpha), ctx.e, r_top, not free)


def is_member(gen_matrices, alpha, p: int, e: int = 1) -> bool:
    """α ∈ V^# : M n'est pas libre sur F⟨u_α⟩."""
    if not any(alpha):
        raise ValueError("α = 0 n'est pas un point de test (0 ∈ V^# par définition)")
    ctx = get_field(p, e)
    return evaluate_point(gen_matrices, alpha, ctx).member


# ── Balayage ──────────────────────────────────────────────────────────────────

def projective_point_count(k: int, q: int) -> int:
    return (q ** k - 1) // (q - 1)


def projective_points(k: int, ctx: FieldContext) -> list[tuple[int, ...]]:
    """Représentants normalisés de P^{k−1}(GF(q)), ordre lexicographique."""
    q = ctx.q
    out = []
    for lead in range(k - 1, -1, -1):
        prefix = (0,) * lead + (1,)
        for rest in itertools.product(range(q), repeat=k - lead - 1):
            out.append(prefix + rest)
    return out


def scan(gen_matrices, p: int, e: int, threads: int = 1,
         budget: int = SCAN_POINT_BUDGET, progress: bool = False) -> list[PointRecord]:
    """Un enregistrement par point projectif de GF(p^e)^k, dans l'ordre lexicographique."""
    if not 1 <= e <= EXT_LIMIT:
        raise ValueError(f"Degré d'extension e={e} hors de [1, {EXT_LIMIT}]")
    k = len(gen_matrices)
    ctx = get_field(p, e)
    count = projective_point_count(k, ctx.q)
    if count > budget:
        raise ResourceLimitError(
            f"{count} points projectifs sur {ctx.label()} pour k={k} > budget {budget}"
        )
    points = projective_points(k, ctx)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        results = pool.map(lambda a: evaluate_point(gen_matrices, a, ctx), points)
        records = list(tqdm(results, total=len(points), disable=not progress,
                            file=sys.stderr, desc=f"scan {ctx.label()}", leave=False))
    members = sum(r.member for r in records)
    logger.info("Scan %s : %d/%d points dans la variété", ctx.label(), members, len(records))
    return records


# ── Élément σ ─────────────────────────────────────────────────────────────────

def sigma_rank(gen_matrices, p: int, budget: int = GROUP_ORDER_BUDGET) -> SigmaSummary:
    """free_count = rang(Σ_{g∈E} g) ; pf_dim = dim − p^k · free_count.

    En caractéristique p, 1 + g + … + g^{p−1} = (g − 1)^{p−1}, donc
    Σ_{g∈E} g = Π_i (A_i − I)^{p−1}.
    """
    dim = _check_generators(gen_matrices)
    k = len(gen_matrices)
    order = p ** k
    if order > budget:
        raise ResourceLimitError(f"|E| = {order} dépasse le budget d'énumération {budget}")
    ctx = gen_matrices[0].ctx
    eye = DenseMatrix.identity(ctx, dim)
    S = eye
    for A in gen_matrices:
        S = S @ (A - eye).power(p - 1)
    free = rank(S)
    pf_dim = dim - order * free
    if pf_dim < 0:
        raise InternalAssertionError(f"pf_dim = {pf_dim} < 0 (rang σ = {free}, |E| = {order})")
    logger.info("σ_E : %d facteurs libres, partie non projective de dimension %d", free, pf_dim)
    return SigmaSummary(free, pf_dim, order)


# ── Point générique d'une carte ───────────────────────────────────────────────

def _chart_poly_matrix(gen_matrices, p: int, chart: int, degree_cap: int) -> PolyMatrix:
    k = len(gen_matrices)
    nvars = k - 1
    dim = gen_matrices[0].rows
    eye = np.eye(dim, dtype=np.int64)
    terms = []
    var = 0
    for i, A in enumerate(gen_matrices):
        if i == chart:
            coef = poly_const(1, nvars, p)
        else:
            coef = poly_var(var, nvars, p)
            var += 1
        terms.append((coef, (A.data.astype(np.int64) - eye) % p))
    return PolyMatrix.from_linear(p, nvars, terms, degree_cap)


def _check_witness_minor(gen_matrices, p: int, witness: PointRecord,
                         members: list[PointRecord]) -> None:
    """Le mineur non nul au témoin doit s'annuler en chaque point de la variété."""
    dim = gen_matrices[0].rows
    if witness.e != 1 or dim > MINOR_CHECK_DIM or not members:
        return
    ctx = get_field(p, 1)
    P = u_alpha_minus_one(gen_matrices, witness.alpha, ctx).power(p - 1)
    rows, cols = nonsingular_minor(P)
    r = len(rows)
    for rec in members[:MINOR_SPOT_CHECKS]:
        ctx_m = get_field(p, rec.e)
        Pm = u_alpha_minus_one(gen_matrices, rec.alpha, ctx_m).power(p - 1)
        if rank(Pm.submatrix(rows, cols)) == r:
            raise InternalAssertionError(
                f"Mineur témoin non nul au point α={rec.alpha} (e={rec.e}) de la variété"
            )


def exhaustive_degree_bound(dim: int, p: int, sigma: SigmaSummary | None = None) -> int:
    """Degré par variable des mineurs qui décident l'appartenance sur une carte.

    M = M^pf ⊕ (FE)^free et rang(N^{p−1}) = free·p^{k−1} + rang sur M^pf :
    seuls les mineurs de taille dim(M^pf)/p comptent, de degré ≤ (p−1) par
    ligne. Sans σ_E, on prend M^pf = M.
    """
    pf_dim = sigma.pf_dim if sigma is not None else dim
    return (pf_dim // p) * (p - 1)


def generic_membership(gen_matrices, p: int, chart: int, records=(),
                       sigma: SigmaSummary | None = None,
                       symbolic_max_dim: int = SYMBOLIC_MAX_DIM,
                       degree_cap: int = GENERIC_DEGREE_CAP) -> GenericOutcome:
    """Le point générique de la carte α_chart = 1 est-il dans V^# ?

    Une réponse "member" couvre toute la carte (fermé contenant un ouvert
    dense) ; "non-member" signifie V^# ∩ carte fermé propre.
    """
    dim = _check_generators(gen_matrices)
    k = len(gen_matrices)
    if not 0 <= chart < k:
        raise ValueError(f"Carte {chart} hors de [0, {k})")
    if dim % p:
        return GenericOutcome(chart, "member", "dimension")

    if k == 1:
        rec = evaluate_point(gen_matrices, (1,), get_field(p, 1))
        return GenericOutcome(chart, "member" if rec.member else "non-member", "point")

    on_chart = [r for r in records if r.alpha[chart] != 0]
    members = [r for r in on_chart if r.member]
    witnesses = [r for r in on_chart if not r.member]
    if witnesses:
        w = witnesses[0]
        _check_witness_minor(gen_matrices, p, w, members)
        return GenericOutcome(chart, "non-member", "witness", w.alpha, w.e)

    degree_bound = exhaustive_degree_bound(dim, p, sigma)
    by_e: dict[int, list[PointRecord]] = {}
    for r in on_chart:
        by_e.setdefault(r.e, []).append(r)
    for e, recs in sorted(by_e.items()):
        q = p ** e
        if len(recs) == q ** (k - 1) and all(r.member for r in recs) and q > degree_bound:
            return GenericOutcome(chart, "member", "exhaustive")

    if dim <= symbolic_max_dim:
        try:
            N = _chart_poly_matrix(gen_matrices, p, chart, degree_cap)
            P = N
            for _ in range(p - 2):
                P = P @ N
            r = generic_rank(P)
        except DegreeCapExceeded as exc:
            logger.warning("Carte %d : élimination symbolique abandonnée (%s)", chart, exc)
        else:
            outcome = "member" if r < dim // p else "non-member"
            return GenericOutcome(chart, outcome, "symbolic")

    logger.warning("Carte %d : aucune méthode exacte n'a conclu", chart)
    return GenericOutcome(chart, "aborted", "none")


# ── Synthèse ──────────────────────────────────────────────────────────────────

def _heuristic_estimate(records, p: int, low: int, high: int) -> int:
    counts: dict[int, int] = {}
    for r in records:
        counts[r.e] = counts.get(r.e, 0) + int(r.member)
    usable = sorted((e, c) for e, c in counts.items() if c > 0)
    if not usable:
        return low
    if len(usable) == 1:
        e, c = usable[0]
        slope = math.log(c) / math.log(p ** e)
    else:
        (e1, c1), (e2, c2) = usable[0], usable[-1]
        slope = math.log(c2 / c1) / math.log(p ** (e2 - e1))
    return min(max(round(slope) + 1, low), high)


def dimension_summary(k: int, dim: int, p: int, records=(), generic=(),
                      sigma: SigmaSummary | None = None,
                      cap: int | None = None) -> DimensionSummary:
    """Dimension de V^# : certifiée si une règle exacte s'applique, sinon encadrée."""
    records = list(records)
    generic = list(generic)
    decided = [g for g in generic if g.outcome != "aborted"]
    if decided and len({g.outcome for g in decided}) > 1:
        raise InternalAssertionError(
            "Cartes en désaccord au point générique : "
            + ", ".join(f"{g.chart}:{g.outcome}" for g in decided)
        )
    any_member_point = any(r.member for r in records)

    if decided and decided[0].outcome == "member":
        if cap is not None and cap < k:
            raise InternalAssertionError(f"V^# = F^{k} contredit la borne supérieure {cap}")
        methods = "+".join(sorted({g.method for g in decided}))
        return DimensionSummary.certified_value(k, methods)

    if sigma is not None and sigma.pf_dim == 0:
        if any_member_point:
            raise InternalAssertionError("Module libre sur E mais point de la variété trouvé")
        return DimensionSummary.certified_value(0, "sigma-free")

    all_generic_non_member = bool(decided) and len(decided) == len(generic) \
        and decided[0].outcome == "non-member"
    prime_points = [r for r in records if r.e == 1]
    if (sigma is None and all_generic_non_member and dim % p == 0
            and len(prime_points) == projective_point_count(k, p)
            and not any(r.member for r in prime_points)):
        return DimensionSummary.certified_value(0, "generic")

    low = 1 if any_member_point or (sigma is not None and sigma.pf_dim > 0) else 0
    high = k - 1 if decided else k
    if cap is not None:
        high = min(high, cap)
    if low > high:
        raise InternalAssertionError(f"Encadrement vide [{low}, {high}]")
    if low == high:
        return DimensionSummary.certified_value(low, "bracket")
    estimate = _heuristic_estimate(records, p, low, high)
    logger.warning("Dimension non certifiée : encadrement [%d, %d], estimation %d",
                   low, high, estimate)
    return DimensionSummary(None, False, "heuristic", low, high, estimate, True)


# ── Pipeline ──────────────────────────────────────────────────────────────────

def run_variety(gen_matrices, p: int, *, n: int, shape_label: str, mode: str = "full",
                e_max: int = EXT_MAX, threads: int = 1, cap: int | None = None,
                alpha=None, alpha_e: int = 1, progress: bool = False) -> VarietyReport:
    """Pipeline complet pour un mode donné (point|scan|generic|sigma|full)."""
    if mode not in MODES:
        raise ValueError(f"Mode {mode!r} inconnu (attendu : {', '.join(MODES)})")
    if not 1 <= e_max <= EXT_LIMIT:
        raise ValueError(f"e_max={e_max} hors de [1, {EXT_LIMIT}]")
    dim = _check_generators(gen_matrices)
    k = len(gen_matrices)
    report = VarietyReport(n, p, shape_label, k, dim, mode)

    if mode == "point":
        if alpha is None:
            raise ValueError("Le mode point exige --alpha")
        ctx = get_field(p, alpha_e)
        pt = ShiftedUnitPoint.normalize(alpha, ctx)
        report.points.append(evaluate_point(gen_matrices, pt.alpha, ctx))
        return report

    if mode in ("scan", "full"):
        for e in range(1, e_max + 1):
            try:
                report.points.extend(scan(gen_matrices, p, e, threads=threads, progress=progress))
            except ResourceLimitError as exc:
                if mode == "scan":
                    raise
                report.notes.append(f"scan e={e} omis : {exc}")
    elif mode == "generic":
        report.points.extend(scan(gen_matrices, p, 1, threads=threads, progress=progress))

    if mode in ("sigma", "full"):
        try:
            report.sigma = sigma_rank(gen_matrices, p)
        except ResourceLimitError as exc:
            if mode == "sigma":
                raise
            report.notes.append(f"σ_E omis : {exc}")

    if mode in ("generic", "full"):
        for chart in range(k):
            report.generic.append(
                generic_membership(gen_matrices, p, chart, report.points, report.sigma)
            )

    report.dimension = dimension_summary(k, dim, p, report.points, report.generic,
                                         report.sigma, cap)
    if not report.dimension.certified:
        report.notes.append(
            "dimension non certifiée : points échantillonnés sur des extensions finies "
            "uniquement (pas de preuve sur la clôture algébrique)"
        )
    return report
