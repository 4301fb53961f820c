"""Exact word length in the lamplighter Cayley graphs, plus a BFS oracle.

The length of (η, x) is the minimal number of steps to switch every lamp off
and bring the lamplighter back to the root.  On a tree the walking part of
such a tour is forced: the lamplighter must cover the Steiner tree spanning
{o, x} ∪ supp(η), and a minimal walk from x to o through a subtree with E
edges takes 2E − d(x, o) steps.  Switching costs one step per lit lamp in the
walk-or-switch and multi-state models and is free (bundled into moves) in
switch-walk-switch.

The closed forms are certified against `bfs_oracle`, which measures graph
distance in the Cayley graph directly by breadth-first search over the
generating set's support.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import chain
from typing import Iterable, Sequence

from .tree_group import ReducedWord, identity
from .wreath import (
    LampConfig,
    ModelKind,
    ModelSpec,
    WreathElement,
    generator_support,
    embed,
    identity_element,
    wreath_mul,
)


class ResourceLimitError(RuntimeError):
    """Raised when a search exceeds its configured state budget."""


@dataclass(frozen=True)
class SteinerSummary:
    """Size of the Steiner tree in T_q spanning {o, x} ∪ supp(η).

    edge_count is the number of distinct nonempty prefixes among the spanned
    words, which on a tree equals the Steiner tree's edge count.
    """

    edge_count: int
    dist_x_o: int


def steiner_summary(config: LampConfig, position: ReducedWord) -> SteinerSummary:
    if config.q != position.q:
        raise ValueError(f"config q={config.q} does not match position q={position.q}")
    seen: set[tuple[int, ...]] = set()
    count = 0
    for w in chain(config.support, (position,)):
        t = w.letters
        while t and t not in seen:
            seen.add(t)
            count += 1
            t = t[:-1]
    return SteinerSummary(edge_count=count, dist_x_o=len(position.letters))


def steiner_edge_count_indexed(targets: Iterable[int], parent: Sequence[int]) -> int:
    """Steiner edge count over interned tree vertices (root has id 0).

    Walks each target's ancestor chain until it merges with an already-counted
    path, so the total cost is the size of the spanned subtree.
    """
    seen: set[int] = set()
    count = 0
    for v in targets:
        while v and v not in seen:
            seen.add(v)
            count += 1
            v = parent[v]
    return count


def walk_or_switch_length_from_counts(n_lit: int, edge_count: int, dist_x_o: int) -> int:
    return n_lit + 2 * edge_count - dist_x_o


def sws_length_from_counts(n_lit: int, edge_count: int, dist_x_o: int) -> int:
    # Degenerate case: a lit lamp at o with the lamplighter at o.  Every SWS
    # generator moves, so fixing that lamp costs a full round trip.
    if edge_count == 0:
        return 2 if n_lit else 0
    return 2 * edge_count - dist_x_o


def length_walk_or_switch(z: WreathElement) -> int:
    """Word length under {switch, move} generators; also valid for r > 2 since
    a single generator fixes a lamp in any state."""
    s = steiner_summary(z.config, z.position)
    return walk_or_switch_length_from_counts(len(z.config), s.edge_count, s.dist_x_o)


def length_sws(z: WreathElement) -> int:
    """Word length under the switch-walk-switch generators (r = 2 only)."""
    if z.r != 2:
        raise ValueError(f"switch-walk-switch length requires r = 2, got r={z.r}")
    s = steiner_summary(z.config, z.position)
    return sws_length_from_counts(len(z.config), s.edge_count, s.dist_x_o)


def closed_form_length(z: WreathElement, kind: ModelKind) -> int:
    if kind is ModelKind.SWITCH_WALK_SWITCH:
        return length_sws(z)
    return length_walk_or_switch(z)


def increment_under_move(z: WreathElement, a: int) -> int:
    """Predicted ℓ((0,a)·z) − ℓ(z) for r = 2.

    With x in the cone C_a the length grows iff some lamp outside C_a is lit;
    with x outside C_a it shrinks iff some lamp inside C_a is lit.
    """
    if z.r != 2:
        raise ValueError("increment rule stated for r = 2")
    if not 1 <= a <= z.q:
        raise ValueError(f"generator index {a} out of range 1..{z.q}")
    inside_lit = any(w.first_letter == a for w in z.config.support)
    outside_lit = any(w.first_letter != a for w in z.config.support)
    if z.position.first_letter == a:
        return 1 if outside_lit else -1
    return -1 if inside_lit else 1


def increment_under_switch(z: WreathElement) -> int:
    """Predicted ℓ((1_o,o)·z) − ℓ(z) for r = 2: +1 iff the lamp at o is off."""
    if z.r != 2:
        raise ValueError("increment rule stated for r = 2")
    return 1 if z.config.state(identity(z.q)) == 0 else -1


def bfs_oracle(model: ModelSpec, radius: int, state_cap: int = 50_000_000) -> dict[WreathElement, int]:
    """Exact Cayley distance from the identity for every element reachable in
    `radius` steps.  Probabilities are ignored; only the support of the step
    law matters.  Raises ResourceLimitError past `state_cap` states."""
    if radius < 0 or radius > 6:
        raise ValueError(f"oracle radius must lie in 0..6, got {radius}")
    gens = [embed(g, model.q, model.r) for g in generator_support(model)]
    start = identity_element(model.q, model.r)
    distance: dict[WreathElement, int] = {start: 0}
    frontier = [start]
    for d in range(1, radius + 1):
        nxt: list[WreathElement] = []
        for z in frontier:
            for ge in gens:
                w = wreath_mul(z, ge)
                if w not in distance:
                    distance[w] = d
                    nxt.append(w)
                    if len(distance) > state_cap:
                        raise ResourceLimitError(
                            f"oracle state count exceeded cap of {state_cap}"
                        )
        frontier = nxt
    return distance


def oracle_mismatches(
    model: ModelSpec, radius: int, state_cap: int = 50_000_000
) -> tuple[int, list[tuple[WreathElement, int, int]]]:
    """Compare the closed-form length against BFS distance on the full ball.

    Returns (number of elements checked, mismatches as (element, closed, bfs)).
    """
    distance = bfs_oracle(model, radius, state_cap)
    bad = []
    for z, d in distance.items():
        c = closed_form_length(z, model.kind)
        if c != d:
            bad.append((z, c, d))
    return len(distance), bad
