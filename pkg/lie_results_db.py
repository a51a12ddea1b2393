#!/usr/bin/env python3
"""
lie_results_db.py
=================
Persistance SQLite des certificats de complexité et des rapports de variété.

Deux tables :
  - complexity_certificates : un certificat par run (n, p), JSON complet
  - variety_reports         : un rapport par run (n, p, forme, mode)

Conventions du projet :
  - tables créées avec CREATE TABLE IF NOT EXISTS (jamais destructif)
  - connexions SQLite toujours fermées dans un finally
  - requêtes paramétrées uniquement
  - purge : on conserve les 60 derniers runs par (n, p)

L'horodatage computed_at ne vit que dans la base : les sorties JSON du CLI
restent identiques d'un run à l'autre.
"""

from __future__ import annotations

import json
import logging
import sqlite3
from datetime import datetime, timezone
from pathlib import Path

from lie_config import DB_PATH

logger = logging.getLogger(__name__)

KEEP_RUNS = 60


def _utcnow() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%f")


def get_connection(db_path: Path | str = DB_PATH) -> sqlite3.Connection:
    conn = sqlite3.connect(str(db_path))
    conn.row_factory = sqlite3.Row
    return conn


# ── Initialisation du schéma ─────────────────────────────────────────────────

def init_db(db_path: Path | str = DB_PATH) -> None:
    """Crée les tables si absentes. Idempotent."""
    conn = get_connection(db_path)
    try:
        conn.execute(
            """
            CREATE TABLE IF NOT EXISTS complexity_certificates (
                id           INTEGER PRIMARY KEY AUTOINCREMENT,
                computed_at  TEXT    NOT NULL,
                n            INTEGER NOT NULL,
                p            INTEGER NOT NULL,
                m            INTEGER NOT NULL,
                value        INTEGER,
                low          INTEGER NOT NULL,
                high         INTEGER NOT NULL,
                certified    INTEGER NOT NULL,
                payload      TEXT    NOT NULL
            )
            """
        )
        conn.execute(
            """
            CREATE TABLE IF NOT EXISTS variety_reports (
                id           INTEGER PRIMARY KEY AUTOINCREMENT,
                computed_at  TEXT    NOT NULL,
                n            INTEGER NOT NULL,
                p            INTEGER NOT NULL,
                shape        TEXT    NOT NULL,
                mode         TEXT    NOT NULL,
                dim_value    INTEGER,
                certified    INTEGER NOT NULL,
                method       TEXT,
                payload      TEXT    NOT NULL
            )
            """
        )
        conn.execute(
            "CREATE INDEX IF NOT EXISTS idx_cert_np ON complexity_certificates(n, p)"
        )
        conn.execute(
            "CREATE INDEX IF NOT EXISTS idx_variety_np ON variety_reports(n, p)"
        )
        conn.commit()
    finally:
        conn.close()


def _purge(conn: sqlite3.Connection, table: str, n: int, p: int) -> None:
    # table vient d'une liste fixe, jamais de l'utilisateur
    conn.execute(
        f"""
        DELETE FROM {table}
        WHERE n = ? AND p = ? AND id NOT IN (
            SELECT id FROM {table} WHERE n = ? AND p = ?
            ORDER BY id DESC LIMIT ?
        )
        """,
        (n, p, n, p, KEEP_RUNS),
    )


# ── Écriture ─────────────────────────────────────────────────────────────────

def save_certificate(cert: dict, db_path: Path | str = DB_PATH) -> int:
    """Enregistre le JSON d'un certificat (sortie de ComplexityCertificate.to_json)."""
    init_db(db_path)
    certified = bool(cert.get("certified"))
    low, high = (cert["value"], cert["value"]) if certified else tuple(cert["bracket"])
    conn = get_connection(db_path)
    try:
        cur = conn.execute(
            """INSERT INTO complexity_certificates
               (computed_at, n, p, m, value, low, high, certified, payload)
               VALUES (?,?,?,?,?,?,?,?,?)""",
            (_utcnow(), cert["n"], cert["p"], cert["m"],
             cert.get("value"), low, high, int(certified),
             json.dumps(cert, sort_keys=True)),
        )
        _purge(conn, "complexity_certificates", cert["n"], cert["p"])
        conn.commit()
        logger.info("Certificat Lie(%d), p=%d enregistré (id %d)",
                    cert["n"], cert["p"], cur.lastrowid)
        return cur.lastrowid
    finally:
        conn.close()


def save_variety_report(report: dict, db_path: Path | str = DB_PATH) -> int:
    """Enregistre le JSON d'un rapport (sortie de VarietyReport.to_json)."""
    init_db(db_path)
    dim = report.get("dimension") or {}
    conn = get_connection(db_path)
    try:
        cur = conn.execute(
            """INSERT INTO variety_reports
               (computed_at, n, p, shape, mode, dim_value, certified, method, payload)
               VALUES (?,?,?,?,?,?,?,?,?)""",
            (_utcnow(), report["n"], report["p"], report["shape"], report["mode"],
             dim.get("value"), int(bool(dim.get("certified"))), dim.get("method"),
             json.dumps(report, sort_keys=True)),
        )
        _purge(conn, "variety_reports", report["n"], report["p"])
        conn.commit()
        return cur.lastrowid
    finally:
        conn.close()


# ── Lecture ──────────────────────────────────────────────────────────────────

def latest_certificates(db_path: Path | str = DB_PATH) -> list[dict]:
    """Dernier certificat de chaque (n, p), trié par p puis n."""
    init_db(db_path)
    conn = get_connection(db_path)
    try:
        rows = conn.execute(
            """SELECT c.* FROM complexity_certificates c
               JOIN (SELECT n, p, MAX(id) AS last_id
                     FROM complexity_certificates GROUP BY n, p) l
                 ON c.id = l.last_id
               ORDER BY c.p, c.n"""
        ).fetchall()
    finally:
        conn.close()
    return [dict(r) for r in rows]


def history(n: int, p: int, db_path: Path | str = DB_PATH) -> list[dict]:
    init_db(db_path)
    conn = get_connection(db_path)
    try:
        rows = conn.execute(
            "SELECT * FROM complexity_certificates WHERE n = ? AND p = ? ORDER BY id DESC",
            (n, p),
        ).fetchall()
    finally:
        conn.close()
    return [dict(r) for r in rows]


def latest_variety_reports(n: int, p: int, db_path: Path | str = DB_PATH) -> list[dict]:
    init_db(db_path)
    conn = get_connection(db_path)
    try:
        rows = conn.execute(
            "SELECT * FROM variety_reports WHERE n = ? AND p = ? ORDER BY id DESC",
            (n, p),
        ).fetchall()
    finally:
        conn.close()
    return [dict(r) for r in rows]


def print_report(db_path: Path | str = DB_PATH) -> None:
    certs = latest_certificates(db_path)
    if not certs:
        print("Aucun certificat disponible. Lancez : python lie_cli.py complexity --n 4 --p 2")
        return
    print(f"\n{'═' * 64}")
    print("  Complexité de Lie(n) : derniers certificats")
    print(f"{'═' * 64}")
    print(f"{'n':>4} {'p':>4} {'m':>4}  {'c(Lie(n))':<12} {'statut':<10} calculé")
    print("─" * 64)
    for c in certs:
        if c["certified"]:
            val, status = str(c["value"]), "certifié"
        else:
            val, status = f"[{c['low']}, {c['high']}]", "encadré"
        print(f"{c['n']:>4} {c['p']:>4} {c['m']:>4}  {val:<12} {status:<10} {c['computed_at']}")
    print()
