"""Families of solitary waves over frequency or h*(0) grids.

Rows are independent solves. With ``DKGWAVES_WORKERS`` (or the ``workers``
argument) above one they run in a process pool; the table is assembled after
all rows finish, so the result does not depend on the worker count.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Callable, Iterable, Sequence

import numpy as np

from . import observables
from .dkg_iter import gauge_normalize, iterate
from .dkg_shoot import solve_massless
from .errors import DkgError, NoInteriorMinimumError
from .nld import nld_observables, solve_nld

KINDS = ("iterative", "shooting", "nld")
NAN = float("nan")


@dataclass(frozen=True)
class SweepRow:
    """One solve of a sweep.

    ``coupling`` is the converged ``g`` for iterative rows and the effective
    mass for shooting rows. ``Qt`` and ``Et`` are the unit-coupling (or
    unit-mass) charge and energy. Failed rows carry ``status = "failed: ..."``
    and NaN values.
    """

    omega: float
    M: float
    coupling: float = NAN
    v0: float = NAN
    h0: float = NAN
    Q: float = NAN
    E: float = NAN
    Qt: float = NAN
    Et: float = NAN
    eps: float = NAN
    rel_eps: float = NAN
    iterations: int = 0
    wall_time: float = 0.0
    h_star0: float = NAN
    tilde_v0: float = NAN
    Vt: float = NAN
    converged: bool = True
    status: str = "ok"

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def as_dict(self) -> dict:
        return asdict(self)


ROW_FIELDS = tuple(f.name for f in fields(SweepRow))


@dataclass
class SweepTable:
    kind: str
    n: int
    rows: list[SweepRow] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown sweep kind {self.kind!r}")
        self.rows = sorted(self.rows, key=lambda row: row.omega)

    def ok_rows(self) -> list[SweepRow]:
        return [row for row in self.rows if row.ok]

    def column(self, name: str, only_ok: bool = True) -> np.ndarray:
        rows = self.ok_rows() if only_ok else self.rows
        return np.array([getattr(row, name) for row in rows], dtype=float)

    def __len__(self) -> int:
        return len(self.rows)


def worker_count(workers: int | None = None) -> int:
    if workers is None:
        workers = int(os.environ.get("DKGWAVES_WORKERS", "1"))
    return max(1, workers)


def _run_all(task: Callable, args: Sequence, workers: int | None) -> list[SweepRow]:
    workers = worker_count(workers)
    if workers == 1 or len(args) <= 1:
        return [task(a) for a in args]
    with ProcessPoolExecutor(max_workers=min(workers, len(args))) as pool:
        return list(pool.map(task, args))


def _failed(omega: float, M: float, exc: Exception, started: float, **extra) -> SweepRow:
    return SweepRow(omega=omega, M=M, wall_time=time.perf_counter() - started, converged=False,
                    status=f"failed: {type(exc).__name__}: {exc}", **extra)


def _iterative_task(args) -> SweepRow:
    n, m, M, omega, dr, max_iter = args
    started = time.perf_counter()
    try:
        wave = iterate(n, omega, m=m, M=M, dr=dr, max_iter=max_iter)
    except DkgError as exc:
        return _failed(omega, M, exc, started)
    last = wave.trace[-1]
    unit = observables.compute(gauge_normalize(wave))
    return SweepRow(omega=omega, M=M, coupling=last.g, v0=last.v0, h0=last.h0, Q=last.Q,
                    E=last.E, Qt=unit.Q, Et=unit.E, eps=last.eps, rel_eps=last.rel_eps,
                    iterations=last.iter, wall_time=time.perf_counter() - started,
                    converged=wave.converged)


def _nld_task(args) -> SweepRow:
    n, m, omega, dr = args
    started = time.perf_counter()
    try:
        sol = solve_nld(n, omega, m, dr)
    except DkgError as exc:
        return _failed(omega, math.inf, exc, started)
    o = nld_observables(sol)
    return SweepRow(omega=omega, M=math.inf, coupling=1.0, v0=sol.v0, h0=sol.v0 ** 2, Q=o.Q, E=o.E,
                    Qt=o.Q, Et=o.E, eps=o.epsilon, rel_eps=o.relative_epsilon,
                    wall_time=time.perf_counter() - started)


def _shooting_task(args) -> SweepRow:
    h_star0, dr = args
    started = time.perf_counter()
    try:
        sol = solve_massless(h_star0, dr)
    except DkgError as exc:
        return _failed(NAN, 0.0, exc, started, h_star0=h_star0)
    o = sol.obs
    return SweepRow(omega=sol.tilde_omega, M=0.0, coupling=sol.mu, v0=sol.raw.v0,
                    h0=sol.scalar.center, Q=o.Q, E=sol.mu * o.E, Qt=o.Q, Et=o.E, eps=o.epsilon,
                    rel_eps=o.relative_epsilon, wall_time=time.perf_counter() - started,
                    h_star0=h_star0, tilde_v0=sol.tilde_v0, Vt=o.V)


def sweep_iterative(n: int, M: float, omega_list: Iterable[float], dr: float = 0.01,
                    m: float = 1.0, max_iter: int = 20, workers: int | None = None) -> SweepTable:
    """Iterative solves at each frequency; rows carry unit-coupling observables."""
    args = [(n, m, M, float(w), dr, max_iter) for w in omega_list]
    rows = _run_all(_iterative_task, args, workers)
    return SweepTable("iterative", n, rows, meta={"M": M, "m": m, "dr": dr, "max_iter": max_iter})


def sweep_nld(n: int, omega_list: Iterable[float], dr: float = 0.01, m: float = 1.0,
              workers: int | None = None) -> SweepTable:
    """Cubic Dirac ground states, the infinite boson-mass limit of the family."""
    args = [(n, m, float(w), dr) for w in omega_list]
    return SweepTable("nld", n, _run_all(_nld_task, args, workers), meta={"m": m, "dr": dr})


def sweep_shooting(h_star0_list: Iterable[float], dr: float = 0.01,
                   workers: int | None = None) -> SweepTable:
    """Massless shooting solves, one per prescribed ``h*(0)``, sorted by frequency."""
    args = [(float(h), dr) for h in h_star0_list]
    return SweepTable("shooting", 3, _run_all(_shooting_task, args, workers), meta={"dr": dr})


def find_minimum(omega: np.ndarray, values: np.ndarray) -> tuple[float, float]:
    """Vertex of the parabola through the smallest sample and its two neighbors."""
    omega = np.asarray(omega, dtype=float)
    values = np.asarray(values, dtype=float)
    if omega.size < 3:
        raise NoInteriorMinimumError("need at least three samples")
    i = int(np.argmin(values))
    if i == 0 or i == omega.size - 1:
        raise NoInteriorMinimumError(f"minimum at the endpoint omega={omega[i]}")
    a, b, c = np.polyfit(omega[i - 1:i + 2], values[i - 1:i + 2], 2)
    if not a > 0:
        raise NoInteriorMinimumError("local fit is not convex")
    x = -b / (2 * a)
    return float(x), float(c - b * b / (4 * a))


def find_energy_minimum(table: SweepTable, column: str = "Et") -> tuple[float, float]:
    """Frequency and value of the minimum of ``column`` (unit-coupling energy by default)."""
    return find_minimum(table.column("omega"), table.column(column))


def dE_dQ_consistency(table: SweepTable) -> float:
    """Violation of ``dE/domega = omega dQ/domega`` along an evenly spaced sweep.

    Second-order differences of ``Et`` and ``Qt``; the largest pointwise
    deviation is divided by the largest ``|dE/domega|`` on the sweep.
    """
    w = table.column("omega")
    if w.size < 3:
        raise ValueError("need at least three rows")
    steps = np.diff(w)
    if np.ptp(steps) > 1e-6 * abs(steps.mean()):
        raise ValueError("rows are not evenly spaced")
    step = float(steps.mean())
    dE = np.gradient(table.column("Et"), step, edge_order=2)
    dQ = np.gradient(table.column("Qt"), step, edge_order=2)
    return float(np.max(np.abs(dE - w * dQ)) / max(np.max(np.abs(dE)), 1e-12))


def omega_range(start: float, stop: float, step: float) -> list[float]:
    """Inclusive, evenly spaced frequencies rounded to 12 decimals."""
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 12) for k in range(count)]
