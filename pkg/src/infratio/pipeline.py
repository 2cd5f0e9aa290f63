"""End-to-end bound computation: choose a route, always finish with verification."""

from __future__ import annotations

import tempfile
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .lp import Certificate, LpProblem, export_lp
from .solver import HybridError, Status, hybrid_solve, solve_exact, verify_certificate

# above this many columns the internal exact simplex is not the default route
EXACT_COLUMN_LIMIT = 1024


@dataclass
class BoundConfig:
    method: str = "auto"              # auto | exact | hybrid
    budget: float | None = 3600.0     # seconds per solve
    cap: int = 10 ** 6                # rationalisation denominator cap
    workdir: Path | None = None       # where LP/solution files go
    stem: str = "problem"
    allow_large_exact: bool = False


@dataclass
class BoundResult:
    status: Status
    bound: Fraction | None
    certificate: Certificate | None
    verified: bool
    route: str
    seconds: float
    message: str = ""
    files: dict[str, Path] = field(default_factory=dict)


def compute_bound(p: LpProblem, cfg: BoundConfig | None = None) -> BoundResult:
    cfg = cfg or BoundConfig()
    method = cfg.method
    if method == "auto":
        method = "exact" if len(p.columns) <= EXACT_COLUMN_LIMIT else "hybrid"
    if method == "exact" and p.n >= 14 and not cfg.allow_large_exact:
        raise ValueError("internal exact solves at n >= 14 need allow_large_exact and a budget")
    t0 = time.monotonic()
    if method == "exact":
        return _exact(p, cfg, t0)
    if method == "hybrid":
        return _hybrid(p, cfg, t0)
    raise ValueError(f"unknown method {method!r}")


def _exact(p: LpProblem, cfg: BoundConfig, t0: float) -> BoundResult:
    res = solve_exact(p, budget=cfg.budget)
    cert = res.certificate
    files = {}
    if cert is not None and cfg.workdir is not None:
        files["certificate"] = _save(cert, cfg)
    check = verify_certificate(p, cert) if cert is not None else None
    ok = bool(check)
    bound = cert.bound if ok and cert.kind == "bound" else None
    msg = check.reason if check is not None else ""
    return BoundResult(res.status, bound, cert, ok, "exact", time.monotonic() - t0, msg, files)


def _hybrid(p: LpProblem, cfg: BoundConfig, t0: float) -> BoundResult:
    from .highs_driver import run_external

    tmp = None
    workdir = cfg.workdir
    if workdir is None:
        tmp = tempfile.TemporaryDirectory(prefix="infratio-")
        workdir = Path(tmp.name)
    workdir.mkdir(parents=True, exist_ok=True)
    try:
        mps = workdir / f"{cfg.stem}.mps"
        sol = workdir / f"{cfg.stem}.sol"
        export_lp(p, "mps", mps)
        status = run_external(mps, sol, time_limit=cfg.budget)
        files = {"mps": mps, "solution": sol} if tmp is None else {}
        elapsed = time.monotonic() - t0
        if status == "infeasible":
            # float infeasibility is only a hint; the exact solver gives the proof
            res = solve_exact(p, budget=cfg.budget)
            return BoundResult(res.status, None, res.certificate,
                               res.certificate is not None and bool(
                                   verify_certificate(p, res.certificate)),
                               "exact", time.monotonic() - t0, "infeasible", files)
        if status == "time_limit_reached":
            return BoundResult(Status.BUDGET, None, None, False, "hybrid", elapsed,
                               "external solver hit its time limit", files)
        if status != "optimal":
            return BoundResult(Status.BUDGET, None, None, False, "hybrid", elapsed,
                               f"external solver status {status}", files)
        try:
            cert = hybrid_solve(p, sol, cap=cfg.cap)
        except HybridError as exc:
            return BoundResult(Status.OPTIMAL, None, None, False, "hybrid",
                               time.monotonic() - t0, str(exc), files)
        if tmp is None:
            files["certificate"] = _save(cert, cfg)
        check = verify_certificate(p, cert)
        return BoundResult(Status.OPTIMAL, cert.bound if check else None, cert, bool(check),
                           "hybrid", time.monotonic() - t0, check.reason, files)
    finally:
        if tmp is not None:
            tmp.cleanup()


def _save(cert: Certificate, cfg: BoundConfig) -> Path:
    cfg.workdir.mkdir(parents=True, exist_ok=True)
    path = cfg.workdir / f"{cfg.stem}.cert.json"
    cert.save(path)
    return path
