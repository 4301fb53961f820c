"""Word algebra of the free product of q copies of Z/2.

Vertices of the homogeneous tree T_q (every vertex has q neighbours) are the
reduced words over the involutive generators a_1..a_q: finite sequences of
indices in 1..q with no two equal consecutive letters.  Group multiplication
is concatenation with cancellation of "a_i a_i" blocks, which makes T_q the
Cayley graph of the free product and |w| the graph distance to the root o.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

MAX_DEGREE = 64


def _reduce_letters(letters: Sequence[int], q: int) -> tuple[int, ...]:
    """Cancel adjacent equal letters until none remain (each a_i is an involution)."""
    stack: list[int] = []
    for a in letters:
        if not 1 <= a <= q:
            raise ValueError(f"generator index {a} out of range 1..{q}")
        if stack and stack[-1] == a:
            stack.pop()
        else:
            stack.append(a)
    return tuple(stack)


@dataclass(frozen=True)
class ReducedWord:
    """A vertex of T_q in canonical reduced form; q is the tree degree.

    The constructor reduces eagerly, so equality and hashing are structural and
    every instance satisfies the no-equal-consecutive-letters invariant.
    """

    q: int
    letters: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not isinstance(self.q, int) or not 3 <= self.q <= MAX_DEGREE:
            raise ValueError(f"tree degree q must be an integer in 3..{MAX_DEGREE}, got {self.q}")
        object.__setattr__(self, "letters", _reduce_letters(tuple(self.letters), self.q))

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return ".".join(f"a{a}" for a in self.letters) if self.letters else "o"

    @property
    def is_identity(self) -> bool:
        return not self.letters

    @property
    def first_letter(self) -> int | None:
        return self.letters[0] if self.letters else None


def identity(q: int) -> ReducedWord:
    return ReducedWord(q, ())


def reduce(letters: Iterable[int], q: int) -> ReducedWord:
    """Fully reduce a letter sequence; idempotent on already-reduced input."""
    return ReducedWord(q, tuple(letters))


def _check_same_q(u: ReducedWord, v: ReducedWord) -> None:
    if u.q != v.q:
        raise ValueError(f"alphabet mismatch: q={u.q} vs q={v.q}")


def mul(u: ReducedWord, v: ReducedWord) -> ReducedWord:
    """Group product u∘v: concatenation with cancellation in the middle."""
    _check_same_q(u, v)
    return ReducedWord(u.q, u.letters + v.letters)


def inverse(u: ReducedWord) -> ReducedWord:
    """Inverse word: letters reversed, since every generator is its own inverse."""
    return ReducedWord(u.q, u.letters[::-1])


def dist(u: ReducedWord, v: ReducedWord) -> int:
    """Tree distance d(u,v) = |u^{-1}∘v|.

    Computed by stripping the longest common prefix: after cancelling it, the
    junction letters differ, so no further cancellation is possible.
    """
    _check_same_q(u, v)
    k = 0
    for a, b in zip(u.letters, v.letters):
        if a != b:
            break
        k += 1
    return (len(u.letters) - k) + (len(v.letters) - k)


def is_in_cone(w: ReducedWord, root: ReducedWord) -> bool:
    """True iff w lies in the cone C_root, i.e. root is a prefix of w."""
    _check_same_q(w, root)
    return w.letters[: len(root.letters)] == root.letters


def neighbors(u: ReducedWord, q: int | None = None) -> set[ReducedWord]:
    """The q words at distance 1 from u; for u != o exactly one is shorter."""
    if q is None:
        q = u.q
    if q < 3:
        raise ValueError(f"tree degree q must be >= 3, got {q}")
    if q != u.q:
        raise ValueError(f"alphabet mismatch: word has q={u.q}, requested q={q}")
    out = set()
    last = u.letters[-1] if u.letters else 0
    for a in range(1, q + 1):
        if a == last:
            out.add(ReducedWord(q, u.letters[:-1]))
        else:
            out.add(ReducedWord(q, u.letters + (a,)))
    return out
