"""Exhaustive check of the reduction over every Boolean function of n variables."""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .formula import from_truth_table
from .verify import ReductionReport, verify_reduction

MAX_SWEEP_VARS = 3


@dataclass
class SweepSummary:
    n: int
    total: int = 0
    balanced: int = 0
    unbalanced: int = 0
    biconditional: int = 0
    promise: int = 0
    seconds: float = 0.0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.biconditional == self.total and self.promise == self.total

    def to_dict(self) -> dict:
        return {
            "n": self.n, "total": self.total, "balanced": self.balanced,
            "unbalanced": self.unbalanced, "biconditional_holds": self.biconditional,
            "promise_respected": self.promise, "seconds": round(self.seconds, 3),
            "failures": self.failures, "ok": self.ok,
        }

    def render(self) -> str:
        lines = [
            f"n={self.n} functions={self.total} balanced={self.balanced} unbalanced={self.unbalanced}",
            f"biconditional_holds={self.biconditional}/{self.total}",
            f"promise_respected={self.promise}/{self.total}",
        ]
        lines += [f"FAIL {t}" for t in self.failures]
        return "\n".join(lines) + "\n"


def truth_tables(n: int) -> list[str]:
    size = 2 ** n
    return [format(t, f"0{size}b") for t in range(2 ** size)]


def _check(table: str) -> tuple[str, bool, bool, bool]:
    report: ReductionReport = verify_reduction(from_truth_table(table))
    return table, report.balanced, report.biconditional_holds, report.promise_respected


def sweep(n: int, workers: int = 1) -> SweepSummary:
    if not 1 <= n <= MAX_SWEEP_VARS:
        raise ValueError(f"sweep supports 1 <= n <= {MAX_SWEEP_VARS}, got {n}")
    start = time.perf_counter()
    tables = truth_tables(n)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_check, tables, chunksize=8))
    else:
        results = [_check(t) for t in tables]
    summary = SweepSummary(n)
    # results arrive in truth-table order either way
    for table, balanced, bicond, promise in results:
        summary.total += 1
        summary.balanced += balanced
        summary.unbalanced += not balanced
        summary.biconditional += bicond
        summary.promise += promise
        if not (bicond and promise):
            summary.failures.append(table)
    summary.seconds = time.perf_counter() - start
    return summary
