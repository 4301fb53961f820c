"""Seeded simulation of the three lamplighter walk models and estimators.

Trajectories run over an interned-vertex arena (vertices of T_q are small
integers with parent/letter/depth tables), so one step costs O(1) regardless
of how far the walk has escaped.  Word length at a checkpoint is evaluated by
the geodesic module from the live state: lit-lamp count, Steiner edge count
over the arena, and the current depth.

Randomness: one PCG64 stream per trajectory, seeded base_seed + trial index.
Every step consumes a fixed number of uniforms in a fixed order (switch
decision then direction for walk-or-switch/multi-state; source flip, direction,
destination flip for switch-walk-switch), so results are bit-stable across
thread counts and `sample_step` consumes the stream exactly like the core loop.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import sqrt
from typing import Sequence

import numpy as np

from . import geodesic
from .tree_group import ReducedWord
from .wreath import (
    Generator,
    LampConfig,
    ModelKind,
    ModelSpec,
    Move,
    SwitchAt,
    SwsMove,
    WreathElement,
)

_CHUNK_STEPS = 1 << 16


def resolve_threads(threads: int | None = None) -> int:
    """Thread-count default: explicit value, else LAMPTREE_THREADS, else cores."""
    if threads is not None:
        return max(1, threads)
    env = os.environ.get("LAMPTREE_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def sample_step(model: ModelSpec, rng: np.random.Generator) -> Generator:
    """Draw one step increment from the model's step law."""
    if model.kind is ModelKind.SWITCH_WALK_SWITCH:
        u = rng.random(3)
        return SwsMove(
            1 if u[0] < model.p else 0,
            int(u[1] * model.q) + 1,
            1 if u[2] < model.p else 0,
        )
    u = rng.random(2)
    if u[0] < model.p:
        k = 1
        acc = model.alpha[0]
        while u[0] >= acc:
            acc += model.alpha[k]
            k += 1
        return SwitchAt(k)
    return Move(int(u[1] * model.q) + 1)


class _SimState:
    """Raw outcome of one trajectory over the vertex arena."""

    __slots__ = (
        "model", "n_steps", "parent", "letter", "depth", "cur", "lamps",
        "checkpoints", "path", "events",
    )

    def __init__(self, model, n_steps, parent, letter, depth, cur, lamps, checkpoints, path, events):
        self.model = model
        self.n_steps = n_steps
        self.parent = parent
        self.letter = letter
        self.depth = depth
        self.cur = cur
        self.lamps = lamps
        self.checkpoints = checkpoints
        self.path = path
        self.events = events

    def length_now(self) -> int:
        return _length_from_state(self.model, self.lamps, self.cur, self.parent, self.depth)

    def first_letter(self) -> int | None:
        v = self.cur
        if not v:
            return None
        while self.depth[v] > 1:
            v = self.parent[v]
        return self.letter[v]

    def word_of(self, v: int) -> ReducedWord:
        ls = []
        while v:
            ls.append(self.letter[v])
            v = self.parent[v]
        return ReducedWord(self.model.q, tuple(reversed(ls)))

    def element(self) -> WreathElement:
        config = LampConfig(self.model.q, self.model.r, [(self.word_of(v), s) for v, s in self.lamps.items()])
        return WreathElement(config, self.word_of(self.cur))


def _length_from_state(model: ModelSpec, lamps: dict, cur: int, parent: list, depth: list) -> int:
    targets = list(lamps)
    targets.append(cur)
    edges = geodesic.steiner_edge_count_indexed(targets, parent)
    if model.kind is ModelKind.SWITCH_WALK_SWITCH:
        return geodesic.sws_length_from_counts(len(lamps), edges, depth[cur])
    return geodesic.walk_or_switch_length_from_counts(len(lamps), edges, depth[cur])


def _simulate(
    model: ModelSpec,
    n_steps: int,
    seed: int,
    checkpoint_every: int | None = None,
    record_path: bool = False,
    record_flips: bool = False,
) -> _SimState:
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    rng = np.random.default_rng(seed)
    q, p, r = model.q, model.p, model.r
    sws = model.kind is ModelKind.SWITCH_WALK_SWITCH
    per_step = 3 if sws else 2
    alpha = model.alpha

    parent = [0]
    letter = [0]
    depth = [0]
    children: dict[int, int] = {}
    lamps: dict[int, int] = {}
    cur = 0
    n_vertices = 1
    path = [0] if record_path else None
    events: list[tuple[int, int, int]] | None = [] if record_flips else None
    checkpoints: list[tuple[int, int, int]] = []
    next_cp = checkpoint_every if checkpoint_every else n_steps + 1

    qf = float(q)
    t = 0
    remaining = n_steps
    while remaining:
        m = min(_CHUNK_STEPS, remaining)
        u = rng.random((m, per_step)).ravel().tolist()
        j = 0
        for _ in range(m):
            t += 1
            if sws:
                a = u[j]
                b = u[j + 1]
                c = u[j + 2]
                j += 3
                if a < p:
                    if cur in lamps:
                        del lamps[cur]
                        if events is not None:
                            events.append((t, cur, 0))
                    else:
                        lamps[cur] = 1
                        if events is not None:
                            events.append((t, cur, 1))
                i = int(b * qf) + 1
                if letter[cur] == i:
                    cur = parent[cur]
                else:
                    key = (cur << 7) | i
                    nxt = children.get(key)
                    if nxt is None:
                        nxt = n_vertices
                        n_vertices += 1
                        children[key] = nxt
                        parent.append(cur)
                        letter.append(i)
                        depth.append(depth[cur] + 1)
                    cur = nxt
                if c < p:
                    if cur in lamps:
                        del lamps[cur]
                        if events is not None:
                            events.append((t, cur, 0))
                    else:
                        lamps[cur] = 1
                        if events is not None:
                            events.append((t, cur, 1))
            else:
                a = u[j]
                b = u[j + 1]
                j += 2
                if a < p:
                    k = 1
                    acc = alpha[0]
                    while a >= acc:
                        acc += alpha[k]
                        k += 1
                    s = lamps.get(cur, 0)
                    s = (s + k) % r
                    if s:
                        lamps[cur] = s
                        if events is not None:
                            events.append((t, cur, 1))
                    else:
                        del lamps[cur]
                        if events is not None:
                            events.append((t, cur, 0))
                else:
                    i = int(b * qf) + 1
                    if letter[cur] == i:
                        cur = parent[cur]
                    else:
                        key = (cur << 7) | i
                        nxt = children.get(key)
                        if nxt is None:
                            nxt = n_vertices
                            n_vertices += 1
                            children[key] = nxt
                            parent.append(cur)
                            letter.append(i)
                            depth.append(depth[cur] + 1)
                        cur = nxt
            if path is not None:
                path.append(cur)
            if t == next_cp:
                ell = _length_from_state(model, lamps, cur, parent, depth)
                checkpoints.append((t, ell, depth[cur]))
                next_cp += checkpoint_every
        remaining -= m

    if not checkpoints or checkpoints[-1][0] != n_steps:
        ell = _length_from_state(model, lamps, cur, parent, depth)
        checkpoints.append((n_steps, ell, depth[cur]))
    return _SimState(model, n_steps, parent, letter, depth, cur, lamps, checkpoints, path, events)


@dataclass(frozen=True)
class WalkStats:
    """Checkpointed summary of one trajectory."""

    n_steps: int
    checkpoints: tuple[tuple[int, int, int], ...]
    final_state: WreathElement | None
    first_letter_at_horizon: int | None
    lamp_at_o_at_horizon: int


def run_trajectory(
    model: ModelSpec,
    n_steps: int,
    seed: int,
    checkpoint_every: int | None = None,
    keep_final_state: bool = True,
) -> WalkStats:
    """Run one seeded trajectory; checkpoints carry (step, length, |X_step|).

    keep_final_state=False skips materializing the final wreath element, which
    for long runs is far larger than the checkpoint summaries.
    """
    st = _simulate(model, n_steps, seed, checkpoint_every)
    return WalkStats(
        n_steps=n_steps,
        checkpoints=tuple(st.checkpoints),
        final_state=st.element() if keep_final_state else None,
        first_letter_at_horizon=st.first_letter(),
        lamp_at_o_at_horizon=st.lamps.get(0, 0),
    )


@dataclass(frozen=True)
class EstimateWithCI:
    """Sample mean with its standard error over independent trials."""

    mean: float
    std_error: float
    n_trials: int
    values: tuple[float, ...] = field(default=(), repr=False)

    @staticmethod
    def from_values(values: Sequence[float]) -> "EstimateWithCI":
        n = len(values)
        if n < 1:
            raise ValueError("need at least one value")
        mean = sum(values) / n
        if n > 1:
            var = sum((v - mean) ** 2 for v in values) / (n - 1)
            se = sqrt(var / n)
        else:
            se = 0.0
        return EstimateWithCI(mean, se, n, tuple(values))


def _drift_worker(args: tuple[ModelSpec, int, int]) -> tuple[float, float]:
    model, n_steps, seed = args
    st = _simulate(model, n_steps, seed)
    _, ell, dist = st.checkpoints[-1]
    return ell / n_steps, dist / n_steps


def _map_trials(worker, argslist: list, threads: int):
    if threads > 1 and len(argslist) > 1:
        chunk = max(1, len(argslist) // (threads * 4))
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(worker, argslist, chunksize=chunk))
    return [worker(a) for a in argslist]


def run_drift_trials(
    model: ModelSpec, n_steps: int, n_trials: int, base_seed: int, threads: int = 1
) -> tuple[list[float], list[float]]:
    """Per-trial (length/n, |X_n|/n) pairs for trials seeded base_seed+index."""
    if n_trials < 1:
        raise ValueError(f"n_trials must be >= 1, got {n_trials}")
    args = [(model, n_steps, base_seed + i) for i in range(n_trials)]
    out = _map_trials(_drift_worker, args, threads)
    return [d for d, _ in out], [x for _, x in out]


def estimate_drift(
    model: ModelSpec, n_steps: int, n_trials: int, base_seed: int, threads: int = 1
) -> EstimateWithCI:
    """Mean and standard error of length(Z_n)/n over independent trials."""
    if n_trials < 2:
        raise ValueError(f"n_trials must be >= 2, got {n_trials}")
    drift, _ = run_drift_trials(model, n_steps, n_trials, base_seed, threads)
    return EstimateWithCI.from_values(drift)


def estimate_projection_drift(
    model: ModelSpec, n_steps: int, n_trials: int, base_seed: int, threads: int = 1
) -> EstimateWithCI:
    """Mean and standard error of |X_n|/n over independent trials."""
    if n_trials < 2:
        raise ValueError(f"n_trials must be >= 2, got {n_trials}")
    _, proj = run_drift_trials(model, n_steps, n_trials, base_seed, threads)
    return EstimateWithCI.from_values(proj)


@dataclass(frozen=True)
class BoundaryStats:
    """Finite-horizon proxies for boundary functionals of the walk.

    The first letter of X_n stands in for the first letter of X_inf, and lamps
    are inspected inside the ball of radius ball_radius only, so nu1_est and
    nu2_est carry a truncation bias; coverage reports how often the walk ended
    beyond the ball (it should, in at least 99% of trials).
    """

    n_steps: int
    n_trials: int
    ball_radius: int
    first_letter_freq: dict[int, float]
    lamp_off_freq: float
    lamp_off_se: float
    nu1_est: float
    nu1_se: float
    nu2_est: float
    nu2_se: float
    coverage: float
    horizon_ok: bool


def _boundary_worker(args: tuple[ModelSpec, int, int, int]) -> tuple[int, int, int, int, int]:
    model, n_steps, seed, ball_radius = args
    st = _simulate(model, n_steps, seed)
    first = st.first_letter() or 0
    lamp_off = 1 if st.lamps.get(0, 0) == 0 else 0
    inside_lit = outside_lit = 0
    depth, parent, letter = st.depth, st.parent, st.letter
    for v in st.lamps:
        if depth[v] <= ball_radius:
            u = v
            while depth[u] > 1:
                u = parent[u]
            if v and letter[u] == 1:
                inside_lit = 1
            else:
                outside_lit = 1
    nu1 = 1 if (first != 1 and inside_lit) else 0
    nu2 = 1 if (first == 1 and not outside_lit) else 0
    deep = 1 if depth[st.cur] > ball_radius else 0
    return first, lamp_off, nu1, nu2, deep


def _bernoulli_se(freq: float, n: int) -> float:
    return sqrt(max(freq * (1.0 - freq), 0.0) / n)


def estimate_boundary_stats(
    model: ModelSpec,
    n_steps: int,
    n_trials: int,
    base_seed: int,
    ball_radius: int,
    threads: int = 1,
) -> BoundaryStats:
    """First-letter histogram, lamp-off frequency at o, and the cone-event
    frequencies behind nu1/nu2, all read off the state at the horizon."""
    if model.kind is not ModelKind.WALK_OR_SWITCH:
        raise ValueError("boundary statistics are defined for the walk-or-switch model")
    if ball_radius < 1:
        raise ValueError(f"ball_radius must be >= 1, got {ball_radius}")
    if n_trials < 2:
        raise ValueError(f"n_trials must be >= 2, got {n_trials}")
    args = [(model, n_steps, base_seed + i, ball_radius) for i in range(n_trials)]
    rows = _map_trials(_boundary_worker, args, threads)
    n = len(rows)
    letters = [row[0] for row in rows]
    freq = {a: letters.count(a) / n for a in range(1, model.q + 1)}
    lamp_off = sum(row[1] for row in rows) / n
    nu1 = sum(row[2] for row in rows) / n
    nu2 = sum(row[3] for row in rows) / n
    coverage = sum(row[4] for row in rows) / n
    return BoundaryStats(
        n_steps=n_steps,
        n_trials=n,
        ball_radius=ball_radius,
        first_letter_freq=freq,
        lamp_off_freq=lamp_off,
        lamp_off_se=_bernoulli_se(lamp_off, n),
        nu1_est=nu1,
        nu1_se=_bernoulli_se(nu1, n),
        nu2_est=nu2,
        nu2_se=_bernoulli_se(nu2, n),
        coverage=coverage,
        horizon_ok=coverage >= 0.99,
    )


@dataclass(frozen=True)
class ExitStats:
    """Certified exit times of one switch-walk-switch trajectory.

    exit_times[k] is the first step at depth k after which the walk never
    leaves the cone below that vertex within the horizon; only exits with
    exit_time + horizon_buffer <= n_steps are kept (future-certainty proxy).
    pseudo_increments[k-1] is the 0/2 penalty for a lamp left lit in a sibling
    cone between exits k-1 and k, and lengths_at_exits[k] = length(Z_{e_k}).
    """

    n_steps: int
    horizon_buffer: int
    exit_times: tuple[int, ...]
    pseudo_increments: tuple[int, ...]
    K: int
    lengths_at_exits: tuple[int, ...]


def _find_exits(depths: np.ndarray) -> list[int]:
    """Times t with depth(t) = min depth over [t, horizon]; one per depth level."""
    suffmin = np.minimum.accumulate(depths[::-1])[::-1]
    times = np.flatnonzero(depths == suffmin)
    _, first = np.unique(depths[times], return_index=True)
    return [int(times[i]) for i in first]


def _analyze_exits(st: _SimState, horizon_buffer: int) -> ExitStats:
    n = st.n_steps
    parent = st.parent
    depths = np.fromiter((st.depth[v] for v in st.path), dtype=np.int64, count=n + 1)
    exits = _find_exits(depths)
    spine_index = {st.path[t]: k for k, t in enumerate(exits)}
    n_cert = 0
    while n_cert < len(exits) and exits[n_cert] + horizon_buffer <= n:
        n_cert += 1
    if n_cert == 0:
        return ExitStats(n, horizon_buffer, (), (), 0, ())

    # One forward sweep over flip events, pausing at each certified exit.
    # Every off-spine lamp is anchored at its deepest spine ancestor; per
    # anchor we keep lit-lamp counts (for the pseudo-increments) and
    # refcounted closure edges hanging below the spine (for the length).
    anchor_memo: dict[int, int] = {}
    cnt: dict[int, int] = {}
    acnt = [0] * len(exits)
    litcnt = [0] * len(exits)
    hang_total = 0
    lit_total = 0
    max_anchor = -1

    def anchor_of(w: int) -> int:
        trail = []
        v = w
        while v not in spine_index:
            hit = anchor_memo.get(v)
            if hit is not None:
                base = hit
                break
            trail.append(v)
            v = parent[v]
        else:
            base = spine_index[v]
        for u in trail:
            anchor_memo[u] = base
        return base

    events = st.events or []
    deltas: list[int] = []
    lengths: list[int] = []
    sum_delta = 0
    ei = 0
    n_events = len(events)
    for k in range(n_cert):
        e_k = exits[k]
        while ei < n_events and events[ei][0] <= e_k:
            _, w, lit = events[ei]
            ei += 1
            on_spine = w in spine_index
            j = spine_index[w] if on_spine else anchor_of(w)
            if lit:
                lit_total += 1
                acnt[j] += 1
                if j > max_anchor:
                    max_anchor = j
                if not on_spine:
                    litcnt[j] += 1
                    v = w
                    while v not in spine_index:
                        c = cnt.get(v, 0) + 1
                        cnt[v] = c
                        if c == 1:
                            hang_total += 1
                        v = parent[v]
            else:
                lit_total -= 1
                acnt[j] -= 1
                if not on_spine:
                    litcnt[j] -= 1
                    v = w
                    while v not in spine_index:
                        c = cnt[v] - 1
                        if c:
                            cnt[v] = c
                        else:
                            del cnt[v]
                            hang_total -= 1
                        v = parent[v]
        while max_anchor >= 0 and acnt[max_anchor] == 0:
            max_anchor -= 1
        edges = k + (max_anchor - k if max_anchor > k else 0) + hang_total
        ell = geodesic.sws_length_from_counts(lit_total, edges, k)
        if k >= 1:
            delta = 2 if litcnt[k - 1] > 0 else 0
            sum_delta += delta
            deltas.append(delta)
            if ell < k + sum_delta:
                raise AssertionError(
                    f"exit inequality violated at k={k}: length {ell} < {k + sum_delta}"
                )
        lengths.append(ell)

    return ExitStats(
        n_steps=n,
        horizon_buffer=horizon_buffer,
        exit_times=tuple(exits[:n_cert]),
        pseudo_increments=tuple(deltas),
        K=n_cert - 1,
        lengths_at_exits=tuple(lengths),
    )


def extract_exit_stats(
    model: ModelSpec, n_steps: int, seed: int, horizon_buffer: int | None = None
) -> ExitStats:
    """Run one switch-walk-switch trajectory and certify its exit skeleton."""
    if model.kind is not ModelKind.SWITCH_WALK_SWITCH:
        raise ValueError("exit statistics are defined for the switch-walk-switch model")
    if horizon_buffer is None:
        horizon_buffer = 10 * model.q
    if horizon_buffer < 1:
        raise ValueError(f"horizon_buffer must be >= 1, got {horizon_buffer}")
    st = _simulate(model, n_steps, seed, record_path=True, record_flips=True)
    return _analyze_exits(st, horizon_buffer)


@dataclass(frozen=True)
class ExitTrialSummary:
    """Per-trajectory roll-up used by the acceleration checks."""

    drift: float
    projection: float
    delta_sum: int
    delta_count: int
    min_slack: int


def _exit_worker(args: tuple[ModelSpec, int, int, int]) -> ExitTrialSummary:
    model, n_steps, seed, horizon_buffer = args
    st = _simulate(model, n_steps, seed, record_path=True, record_flips=True)
    _, ell, dist = st.checkpoints[-1]
    ex = _analyze_exits(st, horizon_buffer)
    slack = 10**9
    run = 0
    for k, delta in enumerate(ex.pseudo_increments, start=1):
        run += delta
        slack = min(slack, ex.lengths_at_exits[k] - k - run)
    return ExitTrialSummary(
        drift=ell / n_steps,
        projection=dist / n_steps,
        delta_sum=sum(ex.pseudo_increments),
        delta_count=len(ex.pseudo_increments),
        min_slack=slack if ex.pseudo_increments else 0,
    )


def run_exit_trials(
    model: ModelSpec,
    n_steps: int,
    n_trials: int,
    base_seed: int,
    horizon_buffer: int | None = None,
    threads: int = 1,
) -> list[ExitTrialSummary]:
    """Exit analysis over independent trajectories (drift comes for free)."""
    if model.kind is not ModelKind.SWITCH_WALK_SWITCH:
        raise ValueError("exit statistics are defined for the switch-walk-switch model")
    if horizon_buffer is None:
        horizon_buffer = 10 * model.q
    args = [(model, n_steps, base_seed + i, horizon_buffer) for i in range(n_trials)]
    return _map_trials(_exit_worker, args, threads)
