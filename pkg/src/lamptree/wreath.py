"""Elements and group law of the wreath product (Z/r) ≀ T_q.

An element is a pair (lamp configuration, lamplighter position).  The product
is (η1, x)(η2, y) = (η1 ⊕ x·η2, x∘y) with pointwise addition mod r, where the
translate (x·η)(w) = η(x^{-1}∘w).  Three walk models share this algebra and
differ only in their generating set: walk-or-switch, switch-walk-switch (one
step may flip the source lamp, moves one edge, and may flip the destination
lamp), and the multi-state variant with r lamp states.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

from .tree_group import ReducedWord, identity, inverse, mul


class LampConfig:
    """Finitely supported map from T_q vertices to lamp states in Z/r.

    State 0 is never stored, so two configs are equal iff their lit-lamp entry
    sets are equal.  Instances are immutable and hashable.
    """

    __slots__ = ("q", "r", "_states", "_hash")

    def __init__(self, q: int, r: int, entries: Mapping[ReducedWord, int] | Iterable[tuple[ReducedWord, int]] = ()):
        if not isinstance(r, int) or r < 2:
            raise ValueError(f"lamp modulus r must be an integer >= 2, got {r}")
        states: dict[ReducedWord, int] = {}
        items = entries.items() if isinstance(entries, Mapping) else entries
        for w, s in items:
            if not isinstance(w, ReducedWord) or w.q != q:
                raise ValueError(f"lamp key {w} is not a word over q={q}")
            s = s % r
            if s:
                states[w] = s
        self.q = q
        self.r = r
        self._states = states
        self._hash: int | None = None

    def state(self, w: ReducedWord) -> int:
        return self._states.get(w, 0)

    @property
    def support(self) -> frozenset[ReducedWord]:
        return frozenset(self._states)

    def items(self):
        return self._states.items()

    def sorted_items(self) -> list[tuple[ReducedWord, int]]:
        return sorted(self._states.items(), key=lambda kv: kv[0].letters)

    def with_added(self, w: ReducedWord, k: int) -> "LampConfig":
        """Config with k added (mod r) to the lamp at w."""
        if w.q != self.q:
            raise ValueError(f"lamp key {w} is not a word over q={self.q}")
        states = dict(self._states)
        s = (states.pop(w, 0) + k) % self.r
        if s:
            states[w] = s
        out = LampConfig.__new__(LampConfig)
        out.q, out.r, out._states, out._hash = self.q, self.r, states, None
        return out

    def __len__(self) -> int:
        return len(self._states)

    def __bool__(self) -> bool:
        return bool(self._states)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LampConfig):
            return NotImplemented
        return self.q == other.q and self.r == other.r and self._states == other._states

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.q, self.r, frozenset(self._states.items())))
        return self._hash

    def __repr__(self) -> str:
        inner = ", ".join(f"{w}:{s}" for w, s in self.sorted_items())
        return f"LampConfig(q={self.q}, r={self.r}, {{{inner}}})"


def empty_config(q: int, r: int = 2) -> LampConfig:
    return LampConfig(q, r)


def indicator(w: ReducedWord, k: int = 1, r: int = 2) -> LampConfig:
    """The configuration k·1_w (a single lamp at w in state k mod r)."""
    return LampConfig(w.q, r, [(w, k)])


def _check_compatible(c1: LampConfig, c2: LampConfig) -> None:
    if c1.q != c2.q or c1.r != c2.r:
        raise ValueError(f"config mismatch: (q={c1.q}, r={c1.r}) vs (q={c2.q}, r={c2.r})")


def add_configs(c1: LampConfig, c2: LampConfig) -> LampConfig:
    """Pointwise sum mod r (XOR of supports when r = 2)."""
    _check_compatible(c1, c2)
    states = dict(c1.items())
    for w, s in c2.items():
        t = (states.pop(w, 0) + s) % c1.r
        if t:
            states[w] = t
    return LampConfig(c1.q, c1.r, states)


def negate_config(c: LampConfig) -> LampConfig:
    return LampConfig(c.q, c.r, [(w, c.r - s) for w, s in c.items()])


def translate(x: ReducedWord, config: LampConfig) -> LampConfig:
    """The shifted configuration (x·η)(w) = η(x^{-1}∘w): support mapped by w ↦ x∘w."""
    if x.q != config.q:
        raise ValueError(f"position q={x.q} does not match config q={config.q}")
    return LampConfig(config.q, config.r, [(mul(x, w), s) for w, s in config.items()])


def restrict_to_cone(config: LampConfig, a: int, inside: bool) -> LampConfig:
    """The part of a configuration inside the cone C_{a} (or its complement).

    The two restrictions partition the support; the root o lies outside C_a.
    """
    if not 1 <= a <= config.q:
        raise ValueError(f"generator index {a} out of range 1..{config.q}")
    keep = [(w, s) for w, s in config.items() if (w.first_letter == a) == inside]
    return LampConfig(config.q, config.r, keep)


@dataclass(frozen=True)
class WreathElement:
    """A wreath-product element (configuration, position)."""

    config: LampConfig
    position: ReducedWord

    def __post_init__(self) -> None:
        if self.config.q != self.position.q:
            raise ValueError(f"config q={self.config.q} does not match position q={self.position.q}")

    @property
    def q(self) -> int:
        return self.position.q

    @property
    def r(self) -> int:
        return self.config.r


def identity_element(q: int, r: int = 2) -> WreathElement:
    return WreathElement(empty_config(q, r), identity(q))


def wreath_mul(z1: WreathElement, z2: WreathElement) -> WreathElement:
    """(η1, x)(η2, y) = (η1 ⊕ x·η2, x∘y)."""
    _check_compatible(z1.config, z2.config)
    return WreathElement(add_configs(z1.config, translate(z1.position, z2.config)), mul(z1.position, z2.position))


def wreath_inverse(z: WreathElement) -> WreathElement:
    """(η, x)^{-1} = (−(x^{-1}·η), x^{-1})."""
    xinv = inverse(z.position)
    return WreathElement(negate_config(translate(xinv, z.config)), xinv)


@dataclass(frozen=True)
class SwitchAt:
    """Add k (mod r) to the lamp at the lamplighter's position; stay put."""

    k: int = 1


@dataclass(frozen=True)
class Move:
    """Walk along the edge labelled a_i; lamps unchanged."""

    i: int


@dataclass(frozen=True)
class SwsMove:
    """One switch-walk-switch step: optional flip at the source, a move along
    a_i, then an optional flip at the destination.  Counted as a single step
    (one Cayley edge).  flip_source/flip_dest of 0 mean "no flip"."""

    flip_source: int
    move: int
    flip_dest: int


Generator = Union[SwitchAt, Move, SwsMove]


def _check_generator(g: Generator, q: int, r: int) -> None:
    if isinstance(g, SwitchAt):
        if not 1 <= g.k <= r - 1:
            raise ValueError(f"switch state {g.k} out of range 1..{r - 1}")
    elif isinstance(g, Move):
        if not 1 <= g.i <= q:
            raise ValueError(f"move index {g.i} out of range 1..{q}")
    elif isinstance(g, SwsMove):
        if r != 2:
            raise ValueError("switch-walk-switch generators require r = 2")
        if not 1 <= g.move <= q:
            raise ValueError(f"move index {g.move} out of range 1..{q}")
        if g.flip_source not in (0, 1) or g.flip_dest not in (0, 1):
            raise ValueError("SWS flips must be 0 or 1")
    else:
        raise TypeError(f"not a generator: {g!r}")


def embed(g: Generator, q: int, r: int = 2) -> WreathElement:
    """The group element realizing one application of the generator."""
    _check_generator(g, q, r)
    o = identity(q)
    if isinstance(g, SwitchAt):
        return WreathElement(indicator(o, g.k, r), o)
    if isinstance(g, Move):
        return WreathElement(empty_config(q, r), ReducedWord(q, (g.i,)))
    lamps = [(o, g.flip_source), (ReducedWord(q, (g.move,)), g.flip_dest)]
    return WreathElement(LampConfig(q, r, lamps), ReducedWord(q, (g.move,)))


def apply_generator(z: WreathElement, g: Generator) -> WreathElement:
    """Right-multiply by a generator: one step of the walk Z_n = Z_{n-1}·g.

    Equals wreath_mul(z, embed(g, z.q, z.r)); implemented directly since a step
    only touches lamps at the pre-move and post-move positions.
    """
    _check_generator(g, z.q, z.r)
    if isinstance(g, SwitchAt):
        return WreathElement(z.config.with_added(z.position, g.k), z.position)
    if isinstance(g, Move):
        return WreathElement(z.config, mul(z.position, ReducedWord(z.q, (g.i,))))
    config = z.config
    if g.flip_source:
        config = config.with_added(z.position, 1)
    pos = mul(z.position, ReducedWord(z.q, (g.move,)))
    if g.flip_dest:
        config = config.with_added(pos, 1)
    return WreathElement(config, pos)


class ModelKind(enum.Enum):
    WALK_OR_SWITCH = "wos"
    SWITCH_WALK_SWITCH = "sws"
    MULTI_STATE = "multi"


@dataclass(frozen=True)
class ModelSpec:
    """A walk model: which generating set is used and with what step law.

    walk-or-switch picks the single flip with probability p and each move with
    probability (1-p)/q; switch-walk-switch flips source/destination
    independently with probability p around a uniform move; the multi-state
    model adds state k with probability alpha_k (sum alpha_k = p).
    """

    kind: ModelKind
    q: int
    p: float
    r: int = 2
    alpha: tuple[float, ...] = field(default=())

    def __post_init__(self) -> None:
        if not isinstance(self.q, int) or self.q < 3:
            raise ValueError(f"tree degree q must be an integer >= 3, got {self.q}")
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"switch probability p must lie in (0,1), got {self.p}")
        if self.kind is ModelKind.MULTI_STATE:
            if self.r < 2:
                raise ValueError(f"lamp modulus r must be >= 2, got {self.r}")
            alpha = tuple(float(a) for a in self.alpha)
            if len(alpha) != self.r - 1:
                raise ValueError(f"need {self.r - 1} switch weights, got {len(alpha)}")
            if any(a <= 0 for a in alpha):
                raise ValueError("switch weights must be positive")
            if not math.isclose(sum(alpha), self.p, rel_tol=0.0, abs_tol=1e-12):
                raise ValueError(f"switch weights sum to {sum(alpha)}, expected p={self.p}")
            object.__setattr__(self, "alpha", alpha)
        else:
            if self.r != 2:
                raise ValueError(f"{self.kind.value} model requires r = 2, got r={self.r}")
            object.__setattr__(self, "alpha", (float(self.p),) if self.kind is ModelKind.WALK_OR_SWITCH else ())

    @staticmethod
    def walk_or_switch(q: int, p: float) -> "ModelSpec":
        return ModelSpec(ModelKind.WALK_OR_SWITCH, q, p)

    @staticmethod
    def switch_walk_switch(q: int, p: float) -> "ModelSpec":
        return ModelSpec(ModelKind.SWITCH_WALK_SWITCH, q, p)

    @staticmethod
    def multi_state(q: int, p: float, r: int, alpha: Iterable[float]) -> "ModelSpec":
        return ModelSpec(ModelKind.MULTI_STATE, q, p, r, tuple(alpha))


def generator_support(model: ModelSpec) -> list[Generator]:
    """All generators carrying positive step probability under the model."""
    if model.kind is ModelKind.SWITCH_WALK_SWITCH:
        return [
            SwsMove(s, i, d)
            for i in range(1, model.q + 1)
            for s in (0, 1)
            for d in (0, 1)
        ]
    switches: list[Generator] = [SwitchAt(k) for k in range(1, model.r)]
    return switches + [Move(i) for i in range(1, model.q + 1)]


def element_to_json(z: WreathElement) -> dict:
    """JSON form {"position": [...], "lamps": [[letters, state], ...], "r": r}
    with lamp keys sorted lexicographically."""
    return {
        "position": list(z.position.letters),
        "lamps": [[list(w.letters), s] for w, s in z.config.sorted_items()],
        "r": z.r,
    }


def element_from_json(data: Mapping, q: int) -> WreathElement:
    r = int(data["r"])
    lamps = [(ReducedWord(q, tuple(ls)), int(s)) for ls, s in data["lamps"]]
    return WreathElement(LampConfig(q, r, lamps), ReducedWord(q, tuple(data["position"])))
