"""Locality of cyclic codes: repair groups, hierarchies, availability, trains."""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from . import gf2
from .cyclic import (MAX_ENUM_K, CapacityError, CodeError, CyclicCode, SupportSet, bch_bound,
                     code_from_zeros, coset_closure, load_json, min_distance_bruteforce,
                     punctured_zeros, support_sets)


@dataclass(frozen=True)
class LocalityTrain:
    """The residue class {a, a + n1, ..., a + n - n1}."""

    n: int
    n1: int
    residue: int

    @property
    def indices(self) -> list[int]:
        return list(range(self.residue, self.n, self.n1))

    def __iter__(self):
        return iter(self.indices)


def locality_trains(n: int, n1: int) -> list[LocalityTrain]:
    if n1 < 1 or n1 >= n or n % n1:
        raise CodeError(f"{n1} is not a proper divisor of {n}")
    return [LocalityTrain(n, n1, a) for a in range(n1)]


@dataclass(frozen=True)
class LocalityLevel:
    """Local codes of length n1 supported on the length-n1 support sets.

    ``r`` is the local code dimension; ``delta`` its minimum distance, exact
    when ``delta_exact`` is set and a BCH lower bound otherwise.
    """

    n1: int
    r: int
    delta: int
    delta_exact: bool
    groups: tuple[SupportSet, ...] = dc_field(repr=False)

    @property
    def r_delta(self) -> int:
        """Smallest r with n1 <= r + delta - 1, i.e. the (r, delta) parameter."""
        return self.n1 - self.delta + 1

    def to_json(self) -> dict:
        return {
            "n1": self.n1, "r": self.r, "delta": self.delta, "delta_exact": self.delta_exact,
            "r_delta": self.r_delta, "groups": [g.indices for g in self.groups],
        }


LOCAL_EXACT_MAX_N1 = 24


def locality_from_puncture(code: CyclicCode, n1: int) -> Optional[LocalityLevel]:
    """Locality carried by the length-n1 punctured codes, or None.

    The local codes exist when at least one full train mod n1 lies in the
    zeros. Their distance is computed by enumeration when n1 <= 24 and
    bounded with the BCH bound otherwise.
    """
    pz = punctured_zeros(code, n1)
    if len(pz) == 0:
        return None
    r = n1 - len(pz)
    if n1 <= LOCAL_EXACT_MAX_N1 and r <= MAX_ENUM_K and r > 0:
        local = code_from_zeros(n1, pz.elements)
        delta, exact = min_distance_bruteforce(local), True
    elif r == 0:
        delta, exact = n1 + 1, True
    else:
        delta, exact = bch_bound(pz), False
    return LocalityLevel(n1, r, delta, exact, tuple(support_sets(code.n, n1)))


@dataclass(frozen=True)
class AvailabilityRecord:
    """Per-coordinate orthogonal checks (supports of dual codewords)."""

    r_max: int
    checks: tuple[tuple[tuple[int, ...], ...], ...]

    @property
    def t_per_coordinate(self) -> list[int]:
        return [len(c) for c in self.checks]

    @property
    def t(self) -> int:
        return min(self.t_per_coordinate) if self.checks else 0

    @property
    def r(self) -> int:
        """Largest check weight minus one."""
        return max((len(s) - 1 for cs in self.checks for s in cs), default=0)

    def to_json(self) -> dict:
        return {"n": len(self.checks), "r_max": self.r_max,
                "checks": [[list(s) for s in cs] for cs in self.checks]}


@dataclass(frozen=True)
class LocalityProfile:
    n: int
    levels: tuple[LocalityLevel, ...]
    absent: tuple[int, ...] = ()
    availability: Optional[AvailabilityRecord] = None

    def level(self, n1: int) -> Optional[LocalityLevel]:
        for lv in self.levels:
            if lv.n1 == n1:
                return lv
        return None

    @property
    def is_empty(self) -> bool:
        return not self.levels

    def to_json(self) -> dict:
        out = {"n": self.n, "levels": [lv.to_json() for lv in self.levels],
               "absent": list(self.absent)}
        if self.availability is not None:
            out["availability"] = {"t": self.availability.t, "r": self.availability.r,
                                   "t_per_coordinate": self.availability.t_per_coordinate}
        return out


def hierarchy(code: CyclicCode, chain: Sequence[int]) -> LocalityProfile:
    """Per-level locality for a chain of nested support-set lengths."""
    xs = [int(x) for x in chain]
    for a, b in zip(xs, xs[1:]):
        if b % a or a >= b:
            raise CodeError(f"{xs} is not a divisor chain")
    if xs and code.n % xs[-1]:
        raise CodeError(f"{xs[-1]} does not divide {code.n}")
    levels, absent = [], []
    for x in xs:
        lv = locality_from_puncture(code, x)
        if lv is None:
            absent.append(x)
        else:
            levels.append(lv)
    return LocalityProfile(code.n, tuple(levels), tuple(absent))


def locality_report(code: CyclicCode) -> dict:
    """Locality at every proper divisor plus every chain's hierarchy."""
    from .ordering import enumerate_chains, proper_divisors

    per_div = {}
    for d in proper_divisors(code.n):
        lv = locality_from_puncture(code, d)
        per_div[str(d)] = lv.to_json() if lv is not None else None
    chains = []
    for ch in enumerate_chains(code.n):
        prof = hierarchy(code, ch.elements)
        chains.append({"chain": list(ch.elements), **prof.to_json()})
    return {"per_divisor": per_div, "hierarchies": chains}


# -- availability ---------------------------------------------------------------

def dual_low_weight_supports(code: CyclicCode, max_weight: int) -> list[tuple[int, ...]]:
    """Supports of nonzero dual codewords of weight <= max_weight (n - k <= 24)."""
    if code.n - code.k > MAX_ENUM_K or code.n > 63:
        raise CapacityError(f"dual of {code.name} too large to enumerate; supply the checks")
    words = gf2.span_all(code.H)[1:]
    w = np.bitwise_count(words)
    out = []
    for v in words[w <= max_weight]:
        v = int(v)
        out.append(tuple(i for i in range(code.n) if (v >> i) & 1))
    return out


def is_dual_word(code: CyclicCode, support: Iterable[int]) -> bool:
    v = np.zeros(code.n, dtype=np.int64)
    v[list(support)] = 1
    return not ((code.G.astype(np.int64) @ v) % 2).any()


def availability_checks(code: CyclicCode, r_max: int, t_target: Optional[int] = None,
                        supplied: Optional[Sequence[Sequence[Sequence[int]]]] = None
                        ) -> AvailabilityRecord:
    """Greedy choice of orthogonal checks for every coordinate.

    Candidates are dual codewords of weight <= r_max + 1 containing the
    coordinate, taken in (weight, support) order; one is kept when it meets
    all previously kept ones only at the coordinate. ``supplied`` gives
    candidate supports per coordinate instead of enumerating the dual; each
    is verified against G.
    """
    n = code.n
    if supplied is None:
        pool = dual_low_weight_supports(code, r_max + 1)
        per_coord = [[s for s in pool if i in s] for i in range(n)]
    else:
        if len(supplied) != n:
            raise CodeError(f"check file lists {len(supplied)} coordinates, code has {n}")
        per_coord = []
        for i, cands in enumerate(supplied):
            cs = [tuple(sorted(int(x) for x in s)) for s in cands]
            for s in cs:
                if i not in s:
                    raise CodeError(f"check {s} listed for coordinate {i} does not contain it")
                if not is_dual_word(code, s):
                    raise CodeError(f"check {s} is not a dual codeword of {code.name}")
            per_coord.append([s for s in cs if len(s) <= r_max + 1])

    chosen = []
    for i, cands in enumerate(per_coord):
        picked: list[tuple[int, ...]] = []
        for s in sorted(set(cands), key=lambda s: (len(s), s)):
            ss = set(s)
            if all(ss & set(p) == {i} for p in picked):
                picked.append(s)
                if t_target is not None and len(picked) >= t_target:
                    break
        chosen.append(tuple(picked))
    return AvailabilityRecord(r_max, tuple(chosen))


def load_orthogonal_checks(path: Union[str, Path]) -> list[list[list[int]]]:
    """Read ``{"n": n, "checks": [[support, ...] per coordinate]}``."""
    data = load_json(path)
    checks = data["checks"] if isinstance(data, dict) else data
    if isinstance(checks, dict):
        n = int(data.get("n", len(checks)))
        checks = [checks.get(str(i), []) for i in range(n)]
    return [[list(map(int, s)) for s in cs] for cs in checks]


def save_orthogonal_checks(record_or_checks, path: Union[str, Path]) -> None:
    if isinstance(record_or_checks, AvailabilityRecord):
        payload = record_or_checks.to_json()
    else:
        payload = {"n": len(record_or_checks), "checks": record_or_checks}
    Path(path).write_text(json.dumps(payload))


# -- trains and subcodes -------------------------------------------------------

def add_trains(code: CyclicCode, n1: int, residues: Iterable[int]) -> CyclicCode:
    """Subcode whose zeros also contain the trains of the residues' cosets mod n1."""
    n = code.n
    if n1 < 1 or n1 >= n or n % n1:
        raise CodeError(f"{n1} is not a proper divisor of {n}")
    res = [int(a) for a in residues]
    for a in res:
        if not 0 <= a < n1:
            raise CodeError(f"residue {a} outside [0, {n1 - 1}]")
    closed = coset_closure(n1, res) if res else set()
    new = set(code.zeros.elements)
    for a in closed:
        new.update(range(a, n, n1))
    return code_from_zeros(n, sorted(new))


def count_intersecting_trains(old: CyclicCode, new: CyclicCode, x: int) -> int:
    """Trains mod x that are new in S(new) and meet S(old)."""
    zo, zn = old.zeros, new.zeros
    if not zo.as_set() <= zn.as_set():
        raise CodeError("the new code's zeros must contain the old code's zeros")
    count = 0
    for tr in locality_trains(old.n, x):
        idx = tr.indices
        if all(l in zn for l in idx) and not all(l in zo for l in idx) and any(l in zo for l in idx):
            count += 1
    return count


def repair_erasures(code: CyclicCode, word, erased: Sequence[int], group: Sequence[int]) -> np.ndarray:
    """Fill ``erased`` positions of ``word`` using the local code on ``group``.

    Solves for a local codeword matching the surviving symbols of the group;
    raises when the erasures are not uniquely recoverable.
    """
    group = [int(g) for g in group]
    erased = [int(e) for e in erased]
    if not set(erased) <= set(group):
        raise CodeError("erasures must lie inside the repair group")
    Gl = gf2.row_basis(code.G[:, group])
    pos = {c: j for j, c in enumerate(group)}
    known = [pos[c] for c in group if c not in set(erased)]
    lost = [pos[c] for c in erased]
    w = gf2.as_bits(word)
    # messages m with (m Gl)[known] = w[known]
    m = gf2.solve(Gl[:, known].T, w[[group[j] for j in known]])
    if m is None:
        raise CodeError("surviving symbols are inconsistent with the local code")
    if gf2.rank(Gl[:, known]) < gf2.rank(Gl):
        # the kernel could alter the lost symbols; check that it does not
        ker = gf2.nullspace(Gl[:, known].T)
        if ker.size and ((ker.astype(np.int64) @ Gl[:, lost].astype(np.int64)) % 2).any():
            raise CodeError("erasure pattern is not recoverable within the group")
    out = w.copy()
    local = (m.astype(np.int64) @ Gl.astype(np.int64)) % 2
    out[erased] = local[lost]
    return out
