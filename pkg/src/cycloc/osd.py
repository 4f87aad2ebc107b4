"""BPSK over AWGN and order-l ordered statistics decoding."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import combinations, islice
from math import comb
from typing import Iterator, Optional

import numpy as np

from . import gf2

SNR_CONVENTIONS = ("es", "eb")


def snr_to_n0(snr_db: float, convention: str = "es", rate: float = 1.0) -> float:
    """N0 for unit-energy BPSK symbols.

    ``es``: SNR_dB = 10 log10(1/N0). ``eb``: SNR_dB = 10 log10(1/(R N0)).
    """
    if convention == "es":
        return float(10.0 ** (-snr_db / 10.0))
    if convention == "eb":
        if not 0 < rate <= 1:
            raise ValueError(f"code rate {rate} outside (0, 1]")
        return float(1.0 / (rate * 10.0 ** (snr_db / 10.0)))
    raise ValueError(f"unknown SNR convention {convention!r}; use one of {SNR_CONVENTIONS}")


@dataclass(frozen=True)
class ChannelSpec:
    """AWGN channel with one-sided noise density ``n0`` (variance n0/2)."""

    n0: float
    seed: Optional[int] = None

    def __post_init__(self) -> None:
        if not self.n0 > 0:
            raise ValueError(f"N0 must be positive, got {self.n0}")

    @classmethod
    def from_snr_db(cls, snr_db: float, convention: str = "es", rate: float = 1.0,
                    seed: Optional[int] = None) -> "ChannelSpec":
        return cls(snr_to_n0(snr_db, convention, rate), seed)

    @property
    def sigma(self) -> float:
        return float(np.sqrt(self.n0 / 2.0))

    @property
    def snr_db(self) -> float:
        return float(10.0 * np.log10(1.0 / self.n0))


@dataclass(frozen=True)
class ReceivedWord:
    y: np.ndarray
    x: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.y.shape[-1]


def modulate(bits) -> np.ndarray:
    """Bit 0 -> +1, bit 1 -> -1."""
    return 1.0 - 2.0 * gf2.as_bits(bits).astype(np.float64)


def transmit(codeword, channel: ChannelSpec, rng: Optional[np.random.Generator] = None
             ) -> ReceivedWord:
    """BPSK-modulate and add N(0, N0/2) noise; the rng defaults to one seeded by the channel."""
    x = modulate(codeword)
    if rng is None:
        rng = np.random.default_rng(channel.seed)
    y = x + rng.normal(0.0, channel.sigma, size=x.shape)
    return ReceivedWord(y, x)


def llr(y, n0: float) -> np.ndarray:
    """Channel LLRs 4y/N0; positive favours bit 0."""
    if not n0 > 0:
        raise ValueError(f"N0 must be positive, got {n0}")
    return 4.0 * np.asarray(y, dtype=np.float64) / n0


@dataclass(frozen=True)
class OsdConfig:
    order: int

    def __post_init__(self) -> None:
        if self.order < 0:
            raise ValueError("OSD order must be non-negative")

    def candidates(self, k: int) -> int:
        """M = sum_{i <= l} C(k, i)."""
        return sum(comb(k, i) for i in range(min(self.order, k) + 1))


@dataclass(frozen=True)
class DecodeOutcome:
    """Decoder output. ``metric`` is the squared Euclidean distance to y."""

    codeword: np.ndarray = dc_field(repr=False)
    stage: str
    ml_certified: bool
    metric: float
    candidates: int = 0


@dataclass(frozen=True)
class MriBasis:
    """Most reliable independent positions and the generator reduced on them.

    ``positions[j]`` is the coordinate carrying the j-th information bit, and
    row j of ``G`` has a single 1 there among the MRI columns. ``order`` is
    the full reliability order (most reliable first).
    """

    positions: tuple[int, ...]
    G: np.ndarray = dc_field(repr=False)
    order: tuple[int, ...]


def reliability_order(reliab) -> np.ndarray:
    """Positions by decreasing |reliab|, ties to the lower index."""
    r = np.abs(np.asarray(reliab, dtype=np.float64))
    return np.argsort(-r, kind="stable")


def find_mri(G, reliab) -> MriBasis:
    G = gf2.as_bits(G)
    k = G.shape[0]
    order = reliability_order(reliab)
    R, piv = gf2.rref(G, col_order=order.tolist())
    if len(piv) != k:
        raise AssertionError(f"generator has rank {len(piv)} < {k}")
    return MriBasis(tuple(piv), R[:k], tuple(int(i) for i in order))


def _flip_patterns(k: int, level: int, chunk: int) -> Iterator[np.ndarray]:
    """Size-``level`` subsets of range(k) in lexicographic order, in blocks."""
    it = combinations(range(k), level)
    while True:
        block = list(islice(it, chunk))
        if not block:
            return
        yield np.asarray(block, dtype=np.int64)


def _osd_core(G, reliab, score, max_order: int, chunk: int = 4096
              ) -> list[tuple[np.ndarray, float, int]]:
    """Best (codeword, correlation, candidates so far) after each order 0..max_order."""
    basis = find_mri(G, reliab)
    Gs = basis.G
    k = Gs.shape[0]
    hard = (reliab < 0).astype(np.uint8)
    c0 = ((hard[list(basis.positions)].astype(np.int64) @ Gs.astype(np.int64)) % 2).astype(np.uint8)
    # corr(c0 ^ f) = base - 2 <f, signed>
    signed = score * (1.0 - 2.0 * c0)
    base = float(signed.sum())
    best, best_corr, seen = c0, base, 1
    out = [(best, best_corr, seen)]
    for level in range(1, max_order + 1):
        if level <= k:
            for pats in _flip_patterns(k, level, chunk):
                flips = Gs[pats[:, 0]].copy()
                for j in range(1, level):
                    flips ^= Gs[pats[:, j]]
                vals = base - 2.0 * (flips @ signed)
                a = int(np.argmax(vals))
                seen += len(pats)
                if vals[a] > best_corr:
                    best_corr = float(vals[a])
                    best = c0 ^ flips[a]
        out.append((best, best_corr, seen))
    return out


def _outcome(y, word, seen, stage="OSD") -> DecodeOutcome:
    y = np.asarray(y, dtype=np.float64)
    x = 1.0 - 2.0 * word
    dist = float(np.sum((y - x) ** 2))
    return DecodeOutcome(word.astype(np.uint8), stage, False, dist, seen)


def osd_decode(code, y, config: OsdConfig, llr: Optional[np.ndarray] = None,
               score_on: str = "y") -> DecodeOutcome:
    """Order-l OSD of a single received word.

    Reliabilities and hard decisions come from ``llr`` when given, else from
    y. Candidates are scored by correlation with y (``score_on='y'``) or
    with the LLRs (``'llr'``); the first best candidate found wins.
    """
    return osd_decode_orders(code, y, config.order, llr=llr, score_on=score_on)[-1]


def osd_decode_orders(code, y, max_order: int, llr: Optional[np.ndarray] = None,
                      score_on: str = "y", stage: str = "OSD") -> list[DecodeOutcome]:
    """Outcomes for every order 0..max_order from one reprocessing pass."""
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (code.n,):
        raise ValueError(f"expected a single word of length {code.n}, got shape {y.shape}")
    if score_on not in ("y", "llr"):
        raise ValueError("score_on must be 'y' or 'llr'")
    reliab = y if llr is None else np.asarray(llr, dtype=np.float64)
    score = y if score_on == "y" else reliab
    res = _osd_core(code.G, reliab, score, max_order)
    return [_outcome(y, w, s, stage) for w, _, s in res]


def exhaustive_ml(code, y) -> np.ndarray:
    """Maximum-correlation codeword by full enumeration (k <= 16); first found on ties."""
    y = np.asarray(y, dtype=np.float64)
    words = gf2.enumerate_codewords(code.G)
    signs = 1.0 - 2.0 * words
    if y.ndim == 1:
        return words[int(np.argmax(signs @ y))]
    step = max(1, (1 << 22) // len(words))
    out = np.empty(y.shape, dtype=np.uint8)
    for s in range(0, len(y), step):
        out[s:s + step] = words[np.argmax(signs @ y[s:s + step].T, axis=0)]
    return out
