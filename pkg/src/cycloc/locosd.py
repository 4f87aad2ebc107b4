"""Locality-aware decoding: quick-look ML on a local supercode, one BP round, then OSD."""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from math import comb, erfc, sqrt
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from . import gf2
from .cyclic import contains, linear_code, puncture_generator, support_sets
from .locality import AvailabilityRecord, availability_checks, load_orthogonal_checks
from .ordering import enumerate_chains, gamma_order, identity_order
from .osd import DecodeOutcome, OsdConfig, llr as channel_llr, osd_decode_orders
from .trellis import Trellis, awgn_branch_metrics, build_trellis, complexity, viterbi_decode

LLR_CLIP = 31.0
ATANH_CLIP = 1.0 - 1e-12
VARIANTS = ("spc", "hierarchical", "availability")


class StructureError(ValueError):
    """Local structure inconsistent with the code."""


@dataclass(frozen=True, eq=False)
class LocalStructure:
    """Local constraints of a supercode C_loc of ``code``.

    ``groups`` are disjoint single-parity-check supports (the base level for
    the hierarchical variant). ``middle`` holds the disjoint middle-code
    supports with one trellis each, its section order following the support
    listing. ``checks[i]`` lists the orthogonal checks through coordinate i.
    """

    code: object = dc_field(repr=False)
    variant: str
    groups: tuple[tuple[int, ...], ...] = ()
    middle: tuple[tuple[int, ...], ...] = ()
    trellises: tuple[Trellis, ...] = dc_field(default=(), repr=False)
    checks: tuple[tuple[tuple[int, ...], ...], ...] = dc_field(default=(), repr=False)
    middle_chain: Optional[tuple[int, ...]] = None

    @property
    def n(self) -> int:
        return self.code.n

    @property
    def t(self) -> int:
        return min((len(c) for c in self.checks), default=0)

    def to_json(self) -> dict:
        out: dict = {"variant": self.variant, "n": self.n, "groups": [list(g) for g in self.groups]}
        if self.middle:
            out["middle_supports"] = [list(m) for m in self.middle]
            out["middle_chain"] = list(self.middle_chain) if self.middle_chain else []
        if self.checks:
            out["checks"] = [[list(s) for s in cs] for cs in self.checks]
        return out


def _even_on(G: np.ndarray, support: Sequence[int]) -> bool:
    return not (G[:, list(support)].sum(axis=1) % 2).any()


def _check_disjoint(n: int, sets: Sequence[Sequence[int]], what: str) -> None:
    seen: set[int] = set()
    for s in sets:
        for c in s:
            if not 0 <= c < n:
                raise StructureError(f"{what} coordinate {c} outside [0, {n - 1}]")
            if c in seen:
                raise StructureError(f"{what} overlap at coordinate {c}")
            seen.add(c)


def _sorted_groups(groups) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(sorted(int(c) for c in g)) for g in groups)


def spc_structure(code, groups) -> LocalStructure:
    """Disjoint SPC groups; each must be a parity check of every codeword."""
    gs = _sorted_groups(groups)
    _check_disjoint(code.n, gs, "SPC group")
    for g in gs:
        if not _even_on(code.G, g):
            raise StructureError(f"group {list(g)} is not a parity check of {code.name}")
    return LocalStructure(code, "spc", groups=gs)


def spc_structure_for(code, n1: int) -> LocalStructure:
    """SPC groups on the length-n1 support sets."""
    return spc_structure(code, [s.indices for s in support_sets(code.n, n1)])


def _middle_trellis(code, support: Sequence[int], chain):
    local = linear_code(puncture_generator(code.G, support))
    if chain is None:
        best = None
        options = [identity_order(len(support))] + [gamma_order(len(support), c)
                                                    for c in enumerate_chains(len(support))]
        for order in options:
            t = build_trellis(local, order)
            cost = complexity(t).viterbi_total
            if best is None or cost < best[0]:
                best = (cost, t, order)
        return best[1], best[2].chain.elements
    order = gamma_order(len(support), chain) if len(chain) else identity_order(len(support))
    return build_trellis(local, order), tuple(chain)


def hierarchical_structure(code, middle, groups, chain: Optional[Sequence[int]] = None
                           ) -> LocalStructure:
    """Middle-code supports decoded by trellis, with base-level SPC groups.

    The middle trellis is built on the punctured generator, coordinates in
    the listed support order, under the gamma order of ``chain``; with no
    chain the cheapest Viterbi order among all chains is taken.
    """
    ms = tuple(tuple(int(c) for c in m) for m in middle)
    _check_disjoint(code.n, ms, "middle support")
    base = spc_structure(code, groups).groups if groups else ()
    for g in base:
        if not any(set(g) <= set(m) for m in ms):
            raise StructureError(f"base group {list(g)} is not inside a middle support")
    trellises = []
    used = None
    for m in ms:
        t, used = _middle_trellis(code, m, chain)
        trellises.append(t)
    return LocalStructure(code, "hierarchical", groups=base, middle=ms,
                          trellises=tuple(trellises), middle_chain=used)


def hierarchical_structure_for(code, n_mid: int, n_base: int,
                               chain: Optional[Sequence[int]] = None) -> LocalStructure:
    middle = [s.indices for s in support_sets(code.n, n_mid)]
    base = [s.indices for s in support_sets(code.n, n_base)]
    return hierarchical_structure(code, middle, base, chain)


def availability_structure(code, checks) -> LocalStructure:
    """Per-coordinate orthogonal checks (an AvailabilityRecord or nested lists)."""
    raw = checks.checks if isinstance(checks, AvailabilityRecord) else checks
    if len(raw) != code.n:
        raise StructureError(f"checks listed for {len(raw)} coordinates, code has n={code.n}")
    cs = []
    for i, per in enumerate(raw):
        per = _sorted_groups(per)
        for s in per:
            if i not in s:
                raise StructureError(f"check {list(s)} for coordinate {i} does not contain it")
            if not _even_on(code.G, s):
                raise StructureError(f"check {list(s)} is not a dual codeword of {code.name}")
        for a in range(len(per)):
            for b in range(a + 1, len(per)):
                if set(per[a]) & set(per[b]) != {i}:
                    raise StructureError(f"checks for coordinate {i} are not orthogonal")
        cs.append(per)
    return LocalStructure(code, "availability", checks=tuple(cs))


def structure_from_json(code, data: dict, base_dir: Union[str, Path, None] = None
                        ) -> LocalStructure:
    """Build a structure from explicit supports or from divisor shorthands.

    Accepted keys: ``variant``; ``groups`` or ``n1`` (SPC / base level);
    ``middle_supports`` or ``n_mid``, ``middle_chain`` (hierarchical);
    ``checks``, ``checks_file`` or ``r_max`` [``t``] (availability).
    """
    variant = data.get("variant")
    if variant not in VARIANTS:
        raise StructureError(f"variant must be one of {VARIANTS}, got {variant!r}")
    n = code.n

    def groups_of(key_list: str, key_div: str):
        if key_list in data:
            return data[key_list]
        if key_div in data:
            return [s.indices for s in support_sets(n, int(data[key_div]))]
        return None

    if "n" in data and int(data["n"]) != n:
        raise StructureError(f"structure built for n={data['n']}, code has n={n}")
    if variant == "spc":
        groups = groups_of("groups", "n1")
        if groups is None:
            raise StructureError("spc structure needs groups or n1")
        return spc_structure(code, groups)
    if variant == "hierarchical":
        middle = groups_of("middle_supports", "n_mid")
        if middle is None:
            raise StructureError("hierarchical structure needs middle_supports or n_mid")
        base = groups_of("groups", "n1") or groups_of("groups", "n_base") or []
        chain = data.get("middle_chain")
        return hierarchical_structure(code, middle, base,
                                      None if chain is None else [int(x) for x in chain])
    if "checks" in data:
        return availability_structure(code, data["checks"])
    if "checks_file" in data:
        p = Path(data["checks_file"])
        if base_dir is not None and not p.is_absolute():
            p = Path(base_dir) / p
        raw = load_orthogonal_checks(p)
        r_max = int(data.get("r_max", max(len(s) for cs in raw for s in cs) - 1))
        rec = availability_checks(code, r_max, data.get("t"), supplied=raw)
        return availability_structure(code, rec)
    if "r_max" in data:
        return availability_structure(code, availability_checks(code, int(data["r_max"]),
                                                                data.get("t")))
    raise StructureError("availability structure needs checks, checks_file or r_max")


def load_structure(code, path: Union[str, Path]) -> LocalStructure:
    from .cyclic import load_json

    return structure_from_json(code, load_json(path), Path(path).parent)


def save_structure(structure: LocalStructure, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(structure.to_json()))


def verify_supercode(structure: LocalStructure, samples: int = 10_000, seed: int = 0) -> bool:
    """Every codeword satisfies every SPC and orthogonal check.

    Exhaustive for k <= 16, otherwise on random encodings. Middle codes are
    punctures of C and contain its restrictions by construction.
    """
    code = structure.code
    if code.k <= 16:
        words = gf2.enumerate_codewords(code.G)
    else:
        rng = np.random.default_rng(seed)
        msgs = rng.integers(0, 2, size=(samples, code.k))
        words = (msgs @ code.G.astype(np.int64) % 2).astype(np.uint8)
    sets = list(structure.groups) + [s for cs in structure.checks for s in cs]
    for s in sets:
        if (words[:, list(s)].sum(axis=1) % 2).any():
            return False
    return True


# -- stage 1 ---------------------------------------------------------------------

def qmld_spc(structure: LocalStructure, y):
    """Per-group SPC ML: hard decisions, then fix odd groups at their weakest bit.

    Returns ``(word, in_code)``; both batched when y is (B, n).
    """
    if structure.variant not in ("spc", "hierarchical"):
        raise StructureError("qmld_spc needs SPC groups")
    y = np.asarray(y, dtype=np.float64)
    word = (y < 0).astype(np.uint8)
    flat = word.reshape(-1, y.shape[-1])
    yf = y.reshape(-1, y.shape[-1])
    rows = np.arange(flat.shape[0])
    for g in structure.groups:
        idx = np.asarray(g)
        odd = flat[:, idx].sum(axis=1) % 2 == 1
        weakest = idx[np.argmin(np.abs(yf[:, idx]), axis=1)]
        flat[rows[odd], weakest[odd]] ^= 1
    word = flat.reshape(word.shape)
    return word, contains(structure.code, word)


def qmld_hier(structure: LocalStructure, y):
    """Viterbi on every middle support; other coordinates are hard decisions."""
    if structure.variant != "hierarchical":
        raise StructureError("qmld_hier needs a hierarchical structure")
    if len(structure.trellises) != len(structure.middle):
        raise StructureError("middle trellises missing")
    y = np.asarray(y, dtype=np.float64)
    word = (y < 0).astype(np.uint8)
    for m, t in zip(structure.middle, structure.trellises):
        idx = list(m)
        word[..., idx] = viterbi_decode(t, awgn_branch_metrics(y[..., idx]))
    return word, contains(structure.code, word)


def qmld(structure: LocalStructure, y):
    if structure.variant == "spc":
        return qmld_spc(structure, y)
    if structure.variant == "hierarchical":
        return qmld_hier(structure, y)
    raise StructureError("no quick-look decoder for the availability variant")


def gaussian_q(x: float) -> float:
    return 0.5 * erfc(x / sqrt(2.0))


def qmld_success_bound(n: int, n_l: int, n0: float) -> float:
    """Lower bound on the SPC quick-look success probability, clamped to [0, 1]."""
    if n_l < 1 or n % n_l:
        raise ValueError(f"{n_l} does not divide {n}")
    if not n0 > 0:
        raise ValueError("N0 must be positive")
    per_group = 1.0 - comb(n_l, 2) * (1.0 - gaussian_q(-sqrt(4.0 / n0)))
    return float(min(1.0, max(0.0, per_group)) ** (n // n_l))


# -- stage 2 ---------------------------------------------------------------------

def _extrinsic(llr0: np.ndarray, others: Sequence[Sequence[int]]) -> np.ndarray:
    """2 atanh(prod tanh(l/2)) over each index list; returns (..., len(others))."""
    t = np.tanh(np.clip(llr0, -LLR_CLIP, LLR_CLIP) / 2.0)
    width = max((len(o) for o in others), default=0)
    # pad with a sentinel column whose tanh is 1
    tp = np.concatenate([t, np.ones(t.shape[:-1] + (1,))], axis=-1)
    pad = t.shape[-1]
    idx = np.full((len(others), width), pad, dtype=np.int64)
    for r, o in enumerate(others):
        idx[r, :len(o)] = o
    prod = np.prod(tp[..., idx], axis=-1) if width else np.ones(t.shape[:-1] + (len(others),))
    return 2.0 * np.arctanh(np.clip(prod, -ATANH_CLIP, ATANH_CLIP))


def bp_round_spc(llr0, groups) -> np.ndarray:
    """One check-to-variable round on disjoint SPC groups, plus the channel LLR."""
    l0 = np.asarray(llr0, dtype=np.float64)
    owners, others = [], []
    for g in groups:
        for c in g:
            owners.append(int(c))
            others.append([int(o) for o in g if o != c])
    out = l0.copy()
    if owners:
        out[..., owners] += _extrinsic(l0, others)
    return out


def app_update(llr0, checks) -> np.ndarray:
    """Add the extrinsic terms of every orthogonal check through each coordinate."""
    l0 = np.asarray(llr0, dtype=np.float64)
    owners, others = [], []
    for i, cs in enumerate(checks):
        for s in cs:
            owners.append(i)
            others.append([int(o) for o in s if o != i])
    out = l0.copy()
    if owners:
        ext = _extrinsic(l0, others).reshape(-1, len(owners))
        flat = out.reshape(-1, l0.shape[-1])
        # owners repeat across checks, so accumulate unbuffered
        np.add.at(flat, (slice(None), np.asarray(owners)), ext)
        out = flat.reshape(l0.shape)
    return out


def stage2_llr(structure: LocalStructure, llr0) -> np.ndarray:
    if structure.variant == "availability":
        return app_update(llr0, structure.checks)
    return bp_round_spc(llr0, structure.groups)


def locality_aware_decode(code, structure: LocalStructure, y, osd_config: OsdConfig,
                          n0: float, score_on: str = "y") -> DecodeOutcome:
    """Quick-look ML first; if its word is not in C, one BP round feeds OSD."""
    return locality_aware_decode_orders(code, structure, y, osd_config.order, n0, score_on)[-1]


def locality_aware_decode_orders(code, structure: LocalStructure, y, max_order: int,
                                 n0: float, score_on: str = "y") -> list[DecodeOutcome]:
    """Outcomes for OSD orders 0..max_order sharing one stage-1 pass."""
    if structure.code.n != code.n:
        raise StructureError("structure built for a different code")
    y = np.asarray(y, dtype=np.float64)
    if structure.variant != "availability":
        word, ok = qmld(structure, y)
        if ok:
            dist = float(np.sum((y - (1.0 - 2.0 * word)) ** 2))
            return [DecodeOutcome(word.astype(np.uint8), "QMLD", True, dist, 0)] * (max_order + 1)
    l1 = stage2_llr(structure, channel_llr(y, n0))
    return osd_decode_orders(code, y, max_order, llr=l1, score_on=score_on, stage="BP_OSD")


__all__ = [
    "LocalStructure", "StructureError", "DecodeOutcome", "spc_structure", "spc_structure_for",
    "hierarchical_structure", "hierarchical_structure_for", "availability_structure",
    "structure_from_json", "load_structure", "save_structure", "verify_supercode",
    "qmld_spc", "qmld_hier", "qmld", "qmld_success_bound", "gaussian_q", "bp_round_spc",
    "app_update", "stage2_llr", "locality_aware_decode", "locality_aware_decode_orders",
]
