"""Collider detection and orientation propagation on GEMD output.

Collider rules (evaluated on the unoriented GEMD graph):

* Type A, ``j => k - i``: if the past of ``y_j`` was separated from ``y_i``
  by a set not containing ``k``, orient ``i -> k``.
* Type B, ``j - k - i``: if ``y_i`` and ``y_j`` were feedthrough-separated by
  a set not containing ``k``, orient ``j -> k <- i``.

Propagation (repeated until nothing changes), for an undirected ``i - j``:

* Type A, ``k => i - j``: if the past of ``y_k`` was separated from ``y_j``,
  orient ``i -> j``.
* Type B, ``k -> i - j``: if ``y_k`` and ``y_j`` were feedthrough-separated,
  orient ``i -> j``.

Edges that receive opposite demands in one phase stay undirected and are
reported as conflicts.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .graphs import PartialGraph
from .reconstruct import ReconstructionResult

COLLIDER_A = "colliderA"
COLLIDER_B = "colliderB"
PROPAGATION_A = "propagationA"
PROPAGATION_B = "propagationB"


@dataclass(frozen=True)
class Firing:
    edge: tuple[int, int]          # oriented tail -> head
    rule: str
    triple: tuple[int, int, int]
    witness: tuple[str, tuple[int, int], tuple[int, ...]]  # (record kind, pair, set)

    def log_line(self) -> str:
        kind, pair, s = self.witness
        return (f"{self.rule}: {self.edge[0]} -> {self.edge[1]} via triple "
                f"{self.triple}; {kind} record {pair} set {list(s)}")


@dataclass
class OrientationTrace:
    oriented_edges: list[Firing] = field(default_factory=list)
    conflicts: list[tuple[tuple[int, int], list[Firing]]] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)

    def log_lines(self) -> list[str]:
        lines = [f.log_line() for f in self.oriented_edges]
        for edge, firings in self.conflicts:
            dirs = sorted({f.edge for f in firings})
            lines.append(f"conflict on {edge}: demands {dirs}")
        return lines + [f"note: {d}" for d in self.diagnostics]

    def to_dict(self) -> dict:
        return {
            "oriented_edges": [
                {"edge": list(f.edge), "rule": f.rule, "triple": list(f.triple),
                 "witness": {"kind": f.witness[0], "pair": list(f.witness[1]),
                             "set": list(f.witness[2])}}
                for f in self.oriented_edges],
            "conflicts": [{"edge": list(e), "demands": sorted({tuple(f.edge) for f in fs})}
                          for e, fs in self.conflicts],
            "diagnostics": list(self.diagnostics),
        }


def _neighbours_undirected(g: PartialGraph, v: int) -> list[int]:
    return sorted({b if a == v else a for a, b in g.undirected if v in (a, b)})


def _witness(rec) -> tuple:
    return (rec.kind, tuple(rec.pair), tuple(sorted(rec.separating_set)))


def _resolve(g: PartialGraph, demands: dict, trace: OrientationTrace,
             blocked: set) -> PartialGraph:
    """Apply single-direction demands; record and block conflicting edges."""
    undirected = set(g.undirected)
    directed = set(g.directed)
    for key in sorted(demands):
        firings = demands[key]
        dirs = {f.edge for f in firings}
        if len(dirs) > 1:
            trace.conflicts.append((key, firings))
            blocked.add(key)
            continue
        undirected.discard(key)
        directed.add(firings[0].edge)
        trace.oriented_edges.append(firings[0])
    return PartialGraph(g.n, undirected, directed, g.double_headed)


def detect_colliders(result: ReconstructionResult, trace: OrientationTrace | None = None,
                     blocked: set | None = None):
    g = result.graph
    trace = trace if trace is not None else OrientationTrace()
    blocked = blocked if blocked is not None else set()
    demands: dict[tuple[int, int], list[Firing]] = {}

    def demand(tail, head, rule, triple, rec):
        key = (min(tail, head), max(tail, head))
        demands.setdefault(key, []).append(Firing((tail, head), rule, triple, _witness(rec)))

    for j, k in sorted(g.double_headed):
        for i in _neighbours_undirected(g, k):
            if i == j:
                continue
            rec = result.delayed_record(j, i)
            if rec is None:
                if not g.adjacent(i, j):
                    trace.diagnostics.append(f"no delayed record for {(j, i)}; Type A skipped")
                continue
            if rec.separated and k not in rec.separating_set:
                demand(i, k, COLLIDER_A, (j, k, i), rec)

    for k in range(1, g.n + 1):
        nb = _neighbours_undirected(g, k)
        for x, i in enumerate(nb):
            for j in nb[x + 1:]:
                rec = result.feedthrough_record(i, j)
                if rec is None:
                    trace.diagnostics.append(f"no feedthrough record for {(i, j)}; Type B skipped")
                    continue
                if rec.separated and k not in rec.separating_set:
                    demand(j, k, COLLIDER_B, (j, k, i), rec)
                    demand(i, k, COLLIDER_B, (j, k, i), rec)

    return _resolve(g, demands, trace, blocked), trace


def _propagation_demands(g: PartialGraph, result: ReconstructionResult, rule: str,
                         blocked: set) -> dict:
    demands: dict[tuple[int, int], list[Firing]] = {}
    for a, b in sorted(g.undirected):
        if (a, b) in blocked:
            continue
        for i, j in ((a, b), (b, a)):
            if rule == PROPAGATION_A:
                sources = sorted(k for k, t in g.double_headed if t == i and k != j)
            else:
                sources = sorted(k for k, t in g.directed if t == i and k != j)
            for k in sources:
                if rule == PROPAGATION_A:
                    rec = result.delayed_record(k, j)
                else:
                    rec = result.feedthrough_record(k, j)
                if rec is not None and rec.separated:
                    demands.setdefault((a, b), []).append(
                        Firing((i, j), rule, (k, i, j), _witness(rec)))
                    break
    return demands


def propagate(graph: PartialGraph, trace: OrientationTrace, result: ReconstructionResult,
              blocked: set | None = None):
    blocked = blocked if blocked is not None else {e for e, _ in trace.conflicts}
    g = graph
    while True:
        changed = False
        for rule in (PROPAGATION_A, PROPAGATION_B):
            demands = _propagation_demands(g, result, rule, blocked)
            if demands:
                g = _resolve(g, demands, trace, blocked)
                changed = True
        if not changed:
            return g, trace


def orient_all(result: ReconstructionResult):
    """Collider detection followed by propagation to a fixpoint."""
    blocked: set = set()
    g, trace = detect_colliders(result, OrientationTrace(), blocked)
    return propagate(g, trace, result, blocked)
