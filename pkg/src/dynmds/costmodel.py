"""Operation and memory cost of deriving a session matrix.

The model mirrors the reuse strategy of :func:`dynmds.mds.derive_session_tables`:
an entry equal to 1 costs nothing (its product is e itself), the first
occurrence of each other value costs one field multiplication plus one
2^q-entry product table, and every repeat is a lookup.  Only the ordering
of the results is meaningful; the unit costs are arbitrary round numbers.
"""

from __future__ import annotations

import timeit
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

from .errors import MissingClass, NotSquare, ZeroConstant
from .matrix import Matrix
from .mds import MatrixClass, classify, derive_session_tables


@dataclass(frozen=True)
class CostParams:
    cost_mul: float = 16
    cost_lookup: float = 2
    cost_free: float = 0
    bytes_per_table_entry: int = 1
    # fixed overhead, in 2^q-entry tables: one log/antilog pair
    overhead_tables: int = 2

    def __post_init__(self):
        if min(self.cost_mul, self.cost_lookup, self.cost_free, self.bytes_per_table_entry, self.overhead_tables) < 0:
            raise ValueError("costs must be nonnegative")
        if not self.cost_free <= self.cost_lookup <= self.cost_mul:
            raise ValueError("expected cost_free <= cost_lookup <= cost_mul")


DEFAULT_PARAMS = CostParams()


@dataclass(frozen=True)
class CostReport:
    nontrivial_muls: int
    free_muls: int
    distinct_constant_tables: int
    memory_units: int
    cycle_proxy: float
    cls: MatrixClass

    @property
    def lookups(self) -> int:
        return self.nontrivial_muls - self.distinct_constant_tables

    def to_dict(self) -> dict:
        return {
            "nontrivial_muls": self.nontrivial_muls,
            "free_muls": self.free_muls,
            "tables": self.distinct_constant_tables,
            "memory_units": self.memory_units,
            "cycle_proxy": self.cycle_proxy,
            "class": self.cls.value,
        }


def estimate_generation(a: Matrix, e: int, params: CostParams = DEFAULT_PARAMS) -> CostReport:
    if not a.is_square:
        raise NotSquare(f"{a.rows}x{a.cols} matrix")
    if a.spec.check(e) == 0:
        raise ZeroConstant("scaling constant must be nonzero")
    free = sum(1 for x in a.entries if x == 1)
    nontrivial = len(a.entries) - free
    tables = len({x for x in a.entries if x != 1})
    lookups = nontrivial - tables
    memory = (tables + params.overhead_tables) * a.spec.order * params.bytes_per_table_entry
    cycles = tables * params.cost_mul + lookups * params.cost_lookup + free * params.cost_free
    return CostReport(nontrivial, free, tables, memory, cycles, classify(a))


class Ranked(NamedTuple):
    cls: MatrixClass
    report: CostReport
    rank: int


def rank_classes(
    fixtures: Sequence[Matrix] | Mapping[MatrixClass, Matrix],
    e: int,
    params: CostParams = DEFAULT_PARAMS,
    require_all: bool = False,
) -> list[Ranked]:
    """Order fixtures by ``cycle_proxy``; equal costs share a rank.

    A plain sequence is classified with :func:`classify`; a mapping keeps
    the class it is given.
    """
    if isinstance(fixtures, Mapping):
        items = list(fixtures.items())
    else:
        items = [(classify(a), a) for a in fixtures]
    if not items:
        raise MissingClass("no fixtures given")
    if require_all:
        missing = set(MatrixClass) - {cls for cls, _ in items}
        if missing:
            raise MissingClass("no fixture for " + ", ".join(sorted(c.value for c in missing)))
    reports = [(cls, estimate_generation(a, e, params)) for cls, a in items]
    reports.sort(key=lambda cr: (cr[1].cycle_proxy, cr[1].memory_units))
    out, rank, prev = [], 0, None
    for cls, rep in reports:
        key = (rep.cycle_proxy, rep.memory_units)
        if key != prev:
            rank += 1
            prev = key
        out.append(Ranked(cls, rep, rank))
    return out


def time_derivation(
    fixtures: Mapping[MatrixClass, Matrix],
    e: int,
    number: int = 100,
    repeat: int = 25,
) -> dict[MatrixClass, float]:
    """Best-of-``repeat`` seconds per :func:`derive_session_tables` call.

    Fixtures are timed round-robin inside each repeat so that a burst of
    machine noise hits all of them alike.  Single-threaded; the seed check
    is skipped, as on a release path.
    """
    timers = {}
    for cls, a in fixtures.items():
        derive_session_tables(a, e, check=False)  # warm caches
        timers[cls] = timeit.Timer(lambda a=a: derive_session_tables(a, e, check=False))
    best = {cls: float("inf") for cls in timers}
    for _ in range(repeat):
        for cls, timer in timers.items():
            best[cls] = min(best[cls], timer.timeit(number) / number)
    return best


def orders_agree(ranked: Sequence[Ranked], timings: Mapping[MatrixClass, float]) -> bool:
    """True when every strictly cheaper class (by model) is strictly faster."""
    for x in ranked:
        for y in ranked:
            if x.report.cycle_proxy < y.report.cycle_proxy and not timings[x.cls] < timings[y.cls]:
                return False
    return True


def format_table(ranked: Sequence[Ranked], timings: Mapping[MatrixClass, float] | None = None) -> str:
    """Aligned text table with the columns of the original cost table."""
    header = ("Type of matrix", "Cycle proxy", "Time (us)", "Memory (units)")
    rows = []
    for r in ranked:
        t = f"{timings[r.cls] * 1e6:.2f}" if timings and r.cls in timings else "-"
        rows.append((r.cls.value, f"{r.report.cycle_proxy:g}", t, str(r.report.memory_units)))
    widths = [max(len(h), *(len(row[i]) for row in rows)) for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join([row[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(row[1:], widths[1:])]))
    return "\n".join(lines)
