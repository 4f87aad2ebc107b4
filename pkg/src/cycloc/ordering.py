"""Divisor chains and the coset-tree coordinate ordering they induce."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np


class OrderingError(ValueError):
    pass


def proper_divisors(n: int) -> list[int]:
    """Divisors of n other than 1 and n."""
    return [d for d in range(2, n) if n % d == 0]


@dataclass(frozen=True)
class Chain:
    """Divisors x_1 < ... < x_L of n, each dividing the next."""

    n: int
    elements: tuple[int, ...]

    def __post_init__(self) -> None:
        xs = tuple(int(x) for x in self.elements)
        object.__setattr__(self, "elements", xs)
        for x in xs:
            if x <= 1 or x >= self.n or self.n % x:
                raise OrderingError(f"{x} is not a proper divisor of {self.n}")
        for a, b in zip(xs, xs[1:]):
            if a >= b or b % a:
                raise OrderingError(f"{xs} is not a divisor chain")

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def extended(self) -> tuple[int, ...]:
        """The chain with x_{L+1} = n appended."""
        return self.elements + (self.n,)

    def label(self) -> str:
        return ",".join(map(str, self.elements)) or "identity"


def enumerate_chains(n: int) -> list[Chain]:
    """Every nonempty divisor chain of n, shortest first, then lexicographic."""
    divs = proper_divisors(n)
    out = []
    for size in range(1, len(divs) + 1):
        found = False
        for combo in combinations(divs, size):
            if all(b % a == 0 for a, b in zip(combo, combo[1:])):
                out.append(Chain(n, combo))
                found = True
        if not found:
            break
    return out


@dataclass(frozen=True)
class GammaOrdering:
    """Permutation ``perm`` with perm[j] = original coordinate at position j."""

    n: int
    chain: Chain
    perm: tuple[int, ...]

    @property
    def inverse(self) -> tuple[int, ...]:
        inv = [0] * self.n
        for j, c in enumerate(self.perm):
            inv[c] = j
        return tuple(inv)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.perm, dtype=np.int64)

    def to_json(self) -> dict:
        return {"n": self.n, "chain": list(self.chain.elements), "permutation": list(self.perm)}


def gamma_order(n: int, chain: Sequence[int] | Chain) -> GammaOrdering:
    """Leaves of the subgroup-coset tree, left to right.

    Level l of the tree holds the cosets of the additive subgroup of
    exponents that are multiples of n / x_l. Children are ordered by their
    smallest element and each leaf is listed in increasing order.
    """
    ch = chain if isinstance(chain, Chain) else Chain(n, tuple(chain))
    if ch.n != n:
        raise OrderingError(f"chain built for n={ch.n}, not {n}")
    steps = [n // x for x in reversed(ch.elements)]  # coarse to fine

    def expand(coset: list[int], level: int) -> list[int]:
        if level == len(steps):
            return sorted(coset)
        step = steps[level]
        children: dict[int, list[int]] = {}
        for c in coset:
            children.setdefault(c % step, []).append(c)
        out = []
        for child in sorted(children.values(), key=min):
            out.extend(expand(child, level + 1))
        return out

    return GammaOrdering(n, ch, tuple(expand(list(range(n)), 0)))


def identity_order(n: int) -> GammaOrdering:
    return GammaOrdering(n, Chain(n, ()), tuple(range(n)))


def apply_order(x, order: GammaOrdering | None, inverse: bool = False) -> np.ndarray:
    """Permute the last axis: out[..., j] = x[..., perm[j]] (or the inverse)."""
    arr = np.asarray(x)
    if order is None:
        return arr.copy()
    if arr.shape[-1] != order.n:
        raise OrderingError(f"length {arr.shape[-1]} != n={order.n}")
    idx = order.inverse if inverse else order.perm
    return arr[..., list(idx)]
