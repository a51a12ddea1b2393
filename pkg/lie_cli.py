#!/usr/bin/env python3
"""
lie_cli.py
==========
Interface en ligne de commande du moteur de complexité de Lie(n).

Commandes
---------
  dim          (n−1)! et, pour n ≤ 7, l'oracle du module régulier
  omega        taille du support de ω_n et test ω_n² = n·ω_n
  subgroups    représentants des p-sous-groupes abéliens élémentaires maximaux
  variety      variété de rang par sous-groupe (modes point|scan|generic|sigma|full)
  complexity   certificat c_{S_n}(Lie(n))
  conjecture   V^#_{E_m}(Lie(p^m)) = F^m ?
  consistency  c(Lie(p^m k)) = max_i c(Lie(p^i)) ?
  report       derniers certificats en base ; historique d'un (n, p) avec --n --p
  cache        liste / purge des fichiers LIEM

Codes de sortie : 0 succès, 2 borne de ressources, 3 entrée invalide,
4 assertion interne (invariant mathématique violé).

Usage:
  python lie_cli.py dim --n 5 --p 3
  python lie_cli.py variety --n 4 --p 2 --shape 2 --mode full
  python lie_cli.py complexity --n 6 --p 2 --threads 4 --save
  python lie_cli.py complexity --n 8 --p 2 --force
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import complexity_orchestrator as orch
import lie_results_db
from group_algebra import dsw_element, omega_square, omega_square_check
from lie_config import (
    CACHE_DIR,
    DB_PATH,
    EXT_LIMIT,
    EXT_MAX,
    LOG_LEVEL,
    THREADS,
    VERIFY_MAX_N,
    InternalAssertionError,
    ResourceLimitError,
)
from lie_module import build_representation, clear_cache, list_cache, restrict, verify_dimension
from perm_core import is_prime, maximal_elem_abelians, parse_shape, subgroup_for_shape
from variety_engine import MODES, run_variety

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

EXIT_OK       = 0
EXIT_RESOURCE = 2
EXIT_INPUT    = 3
EXIT_INTERNAL = 4

OMEGA_PRINT_MAX_N = 4     # au-delà, ω_n n'est pas imprimé en entier


# ── Configuration d'un run ────────────────────────────────────────────────────


@dataclass(frozen=True)
class RunConfig:
    command: str
    n: int | None = None
    p: int | None = None
    m: int | None = None
    e_max: int = EXT_MAX
    shape: str | None = None
    mode: str = "full"
    alpha: tuple[int, ...] | None = None
    alpha_e: int = 1
    out: str = "json"
    cache_dir: Path | None = CACHE_DIR
    threads: int = THREADS
    force: bool = False
    db_path: Path = DB_PATH
    save: bool = False
    verbose: bool = False
    action: str = "list"

    def __post_init__(self):
        if self.p is not None and not is_prime(self.p):
            raise ValueError(f"p={self.p} n'est pas premier")
        if self.n is not None and self.n < 1:
            raise ValueError(f"n={self.n} : n ≥ 1 attendu")
        if self.m is not None and self.m < 1:
            raise ValueError(f"m={self.m} : m ≥ 1 attendu")
        if not 1 <= self.e_max <= EXT_LIMIT:
            raise ValueError(f"--ext {self.e_max} hors de [1, {EXT_LIMIT}]")
        if not 1 <= self.alpha_e <= EXT_LIMIT:
            raise ValueError(f"--alpha-ext {self.alpha_e} hors de [1, {EXT_LIMIT}]")
        if self.mode not in MODES:
            raise ValueError(f"--mode {self.mode!r} inconnu")
        if self.out not in ("json", "csv"):
            raise ValueError(f"--out {self.out!r} inconnu (json|csv)")
        if self.threads < 1:
            raise ValueError("--threads ≥ 1 attendu")


def _parse_alpha(text: str | None) -> tuple[int, ...] | None:
    if text is None:
        return None
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise ValueError(f"--alpha invalide : {text!r} (entiers séparés par des virgules)")


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cache_dir = None if getattr(args, "no_cache", False) else Path(args.cache_dir)
    return RunConfig(
        command=args.command,
        n=getattr(args, "n", None),
        p=getattr(args, "p", None),
        m=getattr(args, "m", None),
        e_max=getattr(args, "ext", EXT_MAX),
        shape=getattr(args, "shape", None),
        mode=getattr(args, "mode", "full"),
        alpha=_parse_alpha(getattr(args, "alpha", None)),
        alpha_e=getattr(args, "alpha_ext", 1),
        out=getattr(args, "out", "json"),
        cache_dir=cache_dir,
        threads=getattr(args, "threads", THREADS),
        force=getattr(args, "force", False),
        db_path=Path(args.db),
        save=getattr(args, "save", False),
        verbose=args.verbose,
        action=getattr(args, "action", "list"),
    )


# ── Sorties ───────────────────────────────────────────────────────────────────

def emit(payload: dict, rows: list[dict], cfg: RunConfig) -> None:
    """JSON (avec "schema") ou CSV (une ligne par enregistrement) sur stdout."""
    if cfg.out == "json":
        doc = {"schema": SCHEMA_VERSION, "command": cfg.command}
        doc.update(payload)
        sys.stdout.write(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")
        return
    if not rows:
        return
    fields = list(rows[0].keys())
    writer = csv.DictWriter(sys.stdout, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _csv_cell(v) for k, v in row.items()})


def _csv_cell(v):
    if isinstance(v, (list, tuple)):
        return " ".join(str(x) for x in v)
    if v is None:
        return ""
    return v


def _require(cfg: RunConfig, *names: str) -> None:
    missing = [f"--{n}" for n in names if getattr(cfg, n) is None]
    if missing:
        raise ValueError(f"Commande {cfg.command} : {', '.join(missing)} obligatoire(s)")


# ── Commandes ─────────────────────────────────────────────────────────────────

def cmd_dim(cfg: RunConfig) -> None:
    _require(cfg, "n", "p")
    dim = math.factorial(cfg.n - 1)
    verified = verify_dimension(cfg.n, cfg.p) if cfg.n <= VERIFY_MAX_N else None
    payload = {"n": cfg.n, "p": cfg.p, "dim": dim, "verified": verified}
    emit(payload, [payload], cfg)


def cmd_omega(cfg: RunConfig) -> None:
    _require(cfg, "n", "p")
    omega = dsw_element(cfg.n, cfg.p)
    square = omega_square(cfg.n, cfg.p)
    payload = {
        "n": cfg.n,
        "p": cfg.p,
        "support_size": len(omega.terms),
        "n_mod_p": cfg.n % cfg.p,
        "square_is_zero": square.is_zero(),
        "square_check": omega_square_check(cfg.n, cfg.p),
    }
    if cfg.n <= OMEGA_PRINT_MAX_N:
        payload["omega"] = str(omega)
    emit(payload, [payload], cfg)


def cmd_subgroups(cfg: RunConfig) -> None:
    _require(cfg, "n", "p")
    subgroups = []
    for E in maximal_elem_abelians(cfg.n, cfg.p):
        subgroups.append({
            "shape": E.shape.label(),
            "rank": E.rank,
            "blocks": [list(b) for b in E.support_blocks],
            "generators": [g.to_cycles() for g in E.generators],
        })
    rows = [{"n": cfg.n, "p": cfg.p, **s} for s in subgroups]
    emit({"n": cfg.n, "p": cfg.p, "subgroups": subgroups}, rows, cfg)


def _selected_subgroups(cfg: RunConfig):
    if cfg.shape is None:
        return maximal_elem_abelians(cfg.n, cfg.p)
    return [subgroup_for_shape(parse_shape(cfg.shape, cfg.p, cfg.n), cfg.n)]


def cmd_variety(cfg: RunConfig) -> None:
    _require(cfg, "n", "p")
    subgroups = _selected_subgroups(cfg)
    if not subgroups:
        raise ValueError(f"Aucun p-sous-groupe abélien élémentaire dans S_{cfg.n} pour p={cfg.p}")
    reports = []
    for E in subgroups:
        if cfg.mode == "point":
            if cfg.alpha is None:
                raise ValueError("Le mode point exige --alpha")
            rep = build_representation(cfg.n, cfg.p, E.generators, cache_dir=cfg.cache_dir,
                                       threads=cfg.threads, force=cfg.force)
            report = run_variety(restrict(rep, E), cfg.p, n=cfg.n, shape_label=E.shape.label(),
                                 mode="point", alpha=cfg.alpha, alpha_e=cfg.alpha_e)
        else:
            report = orch.subgroup_complexity(
                cfg.n, cfg.p, E, mode=cfg.mode, e_max=cfg.e_max, cache_dir=cfg.cache_dir,
                threads=cfg.threads, force=cfg.force, progress=cfg.verbose,
            ).report
        reports.append(report.to_json())
    if cfg.save:
        for r in reports:
            lie_results_db.save_variety_report(r, cfg.db_path)
    rows = []
    for r in reports:
        dim = r["dimension"] or {}
        for pt in r["points"] or [{}]:
            rows.append({
                "n": r["n"], "p": r["p"], "shape": r["shape"],
                "alpha": pt.get("alpha"), "e": pt.get("e"),
                "rank": pt.get("rank"), "member": pt.get("member"),
                "dim_value": dim.get("value"), "dim_certified": dim.get("certified"),
                "dim_method": dim.get("method"),
            })
    emit({"n": cfg.n, "p": cfg.p, "reports": reports}, rows, cfg)


def _certificate_rows(cert: dict) -> list[dict]:
    rows = []
    for s in cert["subgroups"]:
        summ = s["summary"]
        rows.append({
            "n": cert["n"], "p": cert["p"], "m": cert["m"], "shape": s["shape"],
            "rank": s["rank"], "cap": s["cap"], "value": summ["value"],
            "certified": summ["certified"], "method": summ["method"],
            "low": summ["low"], "high": summ["high"],
        })
    return rows


def cmd_complexity(cfg: RunConfig) -> None:
    _require(cfg, "n", "p")
    cert = orch.assemble(cfg.n, cfg.p, e_max=cfg.e_max, cache_dir=cfg.cache_dir,
                         threads=cfg.threads, force=cfg.force, progress=cfg.verbose).to_json()
    if cfg.save:
        lie_results_db.save_certificate(cert, cfg.db_path)
    emit(cert, _certificate_rows(cert), cfg)


def cmd_conjecture(cfg: RunConfig) -> None:
    _require(cfg, "m", "p")
    record = orch.conjecture_check(cfg.m, cfg.p, e_max=cfg.e_max, cache_dir=cfg.cache_dir,
                                   threads=cfg.threads, force=cfg.force, progress=cfg.verbose)
    if cfg.save:
        lie_results_db.save_variety_report(record["report"], cfg.db_path)
    row = {k: record[k] for k in ("m", "p", "n", "verdict")}
    row["dim_value"] = record["dimension"]["value"]
    emit(record, [row], cfg)


def cmd_consistency(cfg: RunConfig) -> None:
    _require(cfg, "n", "p")
    record = orch.p_power_consistency(cfg.n, cfg.p, e_max=cfg.e_max, cache_dir=cfg.cache_dir,
                                      threads=cfg.threads, force=cfg.force,
                                      progress=cfg.verbose)
    row = {k: v for k, v in record.items() if k != "powers"}
    emit(record, [row], cfg)


def _strip_payload(rows: list[dict]) -> list[dict]:
    return [{k: v for k, v in r.items() if k != "payload"} for r in rows]


def cmd_report(cfg: RunConfig) -> None:
    if (cfg.n is None) != (cfg.p is None):
        raise ValueError("report : --n et --p vont ensemble")
    if cfg.n is not None:
        history = _strip_payload(lie_results_db.history(cfg.n, cfg.p, cfg.db_path))
        reports = _strip_payload(lie_results_db.latest_variety_reports(cfg.n, cfg.p, cfg.db_path))
        emit({"n": cfg.n, "p": cfg.p, "history": history, "variety_reports": reports},
             history, cfg)
        return
    if cfg.out == "csv":
        emit({}, _strip_payload(lie_results_db.latest_certificates(cfg.db_path)), cfg)
        return
    lie_results_db.print_report(cfg.db_path)


def cmd_cache(cfg: RunConfig) -> None:
    if cfg.cache_dir is None:
        raise ValueError("--no-cache incompatible avec la commande cache")
    if cfg.action == "clear":
        removed = clear_cache(cfg.cache_dir)
        payload = {"cache_dir": str(cfg.cache_dir), "removed": removed}
        emit(payload, [payload], cfg)
        return
    files = [{"file": f.name, "bytes": f.stat().st_size} for f in list_cache(cfg.cache_dir)]
    emit({"cache_dir": str(cfg.cache_dir), "files": files}, files, cfg)


COMMANDS = {
    "dim": cmd_dim,
    "omega": cmd_omega,
    "subgroups": cmd_subgroups,
    "variety": cmd_variety,
    "complexity": cmd_complexity,
    "conjecture": cmd_conjecture,
    "consistency": cmd_consistency,
    "report": cmd_report,
    "cache": cmd_cache,
}


# ── Point d'entrée ────────────────────────────────────────────────────────────

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", choices=("json", "csv"), default="json",
                        help="format de sortie sur stdout (défaut : json)")
    common.add_argument("--db", default=str(DB_PATH), help="base SQLite des certificats")
    common.add_argument("--cache-dir", default=str(CACHE_DIR), help="répertoire des caches LIEM")
    common.add_argument("--no-cache", action="store_true", help="ni lecture ni écriture de cache")
    common.add_argument("--verbose", "-v", action="store_true",
                        help="logs DEBUG et barres de progression sur stderr")

    compute = argparse.ArgumentParser(add_help=False)
    compute.add_argument("--ext", type=int, default=EXT_MAX,
                         help=f"degré d'extension max des scans (défaut : {EXT_MAX}, max {EXT_LIMIT})")
    compute.add_argument("--threads", type=int, default=THREADS, help="nombre de workers")
    compute.add_argument("--force", action="store_true",
                         help="autorise les runs au-delà des bornes bureau (stretch)")
    compute.add_argument("--save", action="store_true", help="enregistre le résultat en base")

    sub = parser.add_subparsers(dest="command", required=True)

    def np_parser(name: str, help_: str, parents) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help_, parents=parents)
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--p", type=int, required=True)
        return sp

    np_parser("dim", "dimension de Lie(n) et oracle", [common])
    np_parser("omega", "identités de ω_n", [common])
    np_parser("subgroups", "sous-groupes abéliens élémentaires maximaux", [common])
    sp = np_parser("variety", "variété de rang par sous-groupe", [common, compute])
    sp.add_argument("--shape", help='forme "r1,r2,…" (défaut : toutes)')
    sp.add_argument("--mode", choices=MODES, default="full")
    sp.add_argument("--alpha", help="point α (codes d'éléments de GF(p^e), séparés par des virgules)")
    sp.add_argument("--alpha-ext", type=int, default=1, help="degré e du corps de α")
    np_parser("complexity", "certificat de complexité", [common, compute])
    sp = sub.add_parser("conjecture", help="V^#_{E_m}(Lie(p^m)) = F^m ?", parents=[common, compute])
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    np_parser("consistency", "cohérence p-puissance", [common, compute])
    sp = sub.add_parser("report", help="derniers certificats en base", parents=[common])
    sp.add_argument("--n", type=int, help="historique d'un seul (n, p)")
    sp.add_argument("--p", type=int)
    sp = sub.add_parser("cache", help="gestion du cache LIEM", parents=[common])
    sp.add_argument("action", nargs="?", choices=("list", "clear"), default="list")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else getattr(logging, LOG_LEVEL, logging.INFO),
        format="%(asctime)sZ %(levelname)s %(message)s",
        stream=sys.stderr,
    )

    try:
        cfg = config_from_args(args)
        COMMANDS[cfg.command](cfg)
    except ResourceLimitError as exc:
        logger.error("Refusé : %s", exc)
        return EXIT_RESOURCE
    except InternalAssertionError as exc:
        logger.critical("Invariant violé : %s", exc)
        return EXIT_INTERNAL
    except ValueError as exc:
        logger.error("Entrée invalide : %s", exc)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
