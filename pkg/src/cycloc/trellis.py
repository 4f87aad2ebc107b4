"""Minimal syndrome trellises, state-complexity profiles and their bounds."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import gf2
from .cyclic import CapacityError, CyclicCode, ZeroSet, dual_zeros
from .ordering import Chain, GammaOrdering, apply_order

MAX_SYNDROME_BITS = 24
MAX_STATE_BITS = 22


class InvariantError(AssertionError):
    """A structural identity that must hold did not."""


class TrellisCapacityError(CapacityError):
    """Trellis too large to build; ``profile`` still carries the analytic data."""

    def __init__(self, msg: str, profile: "DimensionProfile"):
        super().__init__(msg)
        self.profile = profile


@dataclass(frozen=True)
class DimensionProfile:
    """Past/future shortened (p_i, f_i) and punctured (p^i, f^i) dimensions."""

    n: int
    k: int
    p_short: np.ndarray
    f_short: np.ndarray
    p_punct: np.ndarray
    f_punct: np.ndarray

    @property
    def s(self) -> np.ndarray:
        return self.p_punct - self.p_short

    @property
    def max_state(self) -> int:
        return int(self.s.max())

    def expressions(self) -> np.ndarray:
        """The four equivalent state-complexity expressions, shape (4, n + 1)."""
        k = self.k
        return np.stack([
            k - self.p_short - self.f_short,
            self.p_punct - self.p_short,
            self.p_punct + self.f_punct - k,
            self.f_punct - self.f_short,
        ])


def _permuted(code: CyclicCode, order: Optional[GammaOrdering]):
    return apply_order(code.G, order), apply_order(code.H, order)


def dimension_profile(code: CyclicCode, order: Optional[GammaOrdering] = None) -> DimensionProfile:
    """Profile of ``code`` with coordinates taken in ``order``.

    Punctured dimensions come from column ranks of G, shortened ones from
    column ranks of H, so the four state expressions are independent checks
    on each other; a mismatch raises :class:`InvariantError`.
    """
    n, k = code.n, code.k
    G, H = _permuted(code, order)
    idx = np.arange(n + 1)
    p_punct = gf2.prefix_ranks(G)
    f_punct = gf2.suffix_ranks(G)
    p_short = idx - gf2.prefix_ranks(H)
    f_short = (n - idx) - gf2.suffix_ranks(H)
    prof = DimensionProfile(n, k, p_short, f_short, p_punct, f_punct)
    ex = prof.expressions()
    if not (ex == ex[0]).all():
        bad = np.flatnonzero((ex != ex[0]).any(axis=0))
        raise InvariantError(f"state expressions disagree at levels {bad.tolist()}")
    return prof


# -- trellis -------------------------------------------------------------------

class _SpanTester:
    """Vectorized membership test for the span of an echelon basis."""

    def __init__(self, vectors: Sequence[int]):
        vs = sorted(vectors, key=lambda v: -v.bit_length())
        self.leads = np.asarray([v.bit_length() - 1 for v in vs], dtype=np.int64)
        self.vecs = np.asarray(vs, dtype=np.int64)

    def contains(self, x: np.ndarray) -> np.ndarray:
        x = x.copy()
        for lead, v in zip(self.leads, self.vecs):
            x ^= ((x >> lead) & 1) * v
        return x == 0


@dataclass(eq=False)
class Trellis:
    """Minimal bit-level trellis of a code under a fixed coordinate order.

    ``states[i]`` holds the sorted partial syndromes at level i. For the
    section between levels i and i+1, ``pred0[i][v]`` / ``pred1[i][v]`` is the
    index of the level-i predecessor of vertex v through a 0 / 1 edge, or -1.
    """

    n: int
    k: int
    order: Optional[GammaOrdering]
    profile: DimensionProfile
    states: list[np.ndarray]
    pred0: list[np.ndarray]
    pred1: list[np.ndarray]

    @property
    def num_vertices(self) -> int:
        return int(sum(len(s) for s in self.states))

    @property
    def num_edges(self) -> int:
        return int(sum((p0 >= 0).sum() + (p1 >= 0).sum() for p0, p1 in zip(self.pred0, self.pred1)))

    @property
    def vertex_counts(self) -> list[int]:
        return [len(s) for s in self.states]

    def edges(self, level: int) -> list[tuple[int, int, int]]:
        """(from, to, bit) triples of the section leaving ``level``."""
        out = []
        for bit, pred in ((0, self.pred0[level]), (1, self.pred1[level])):
            for v in np.flatnonzero(pred >= 0):
                out.append((int(pred[v]), int(v), bit))
        return sorted(out)

    def enumerate_paths(self, limit: int = 1 << 16) -> np.ndarray:
        """All start-to-end label sequences, in original coordinate order."""
        paths = [(0, [])]  # (vertex index, bits)
        for i in range(self.n):
            nxt = []
            succ: dict[int, list[tuple[int, int]]] = {}
            for src, dst, bit in self.edges(i):
                succ.setdefault(src, []).append((dst, bit))
            for v, bits in paths:
                for dst, bit in succ.get(v, []):
                    nxt.append((dst, bits + [bit]))
            if len(nxt) > limit:
                raise CapacityError(f"more than {limit} paths")
            paths = nxt
        words = np.asarray([b for _, b in paths], dtype=np.uint8).reshape(-1, self.n)
        return apply_order(words, self.order, inverse=True)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "permutation": list(self.order.perm) if self.order else list(range(self.n)),
            "vertex_counts": self.vertex_counts,
            "num_vertices": self.num_vertices,
            "num_edges": self.num_edges,
            "edges": [[[a, b, c] for a, b, c in self.edges(i)] for i in range(self.n)],
        }


def build_trellis(code: CyclicCode, order: Optional[GammaOrdering] = None) -> Trellis:
    """Syndrome trellis: forward expansion of partial syndromes, keeping only
    states that can still reach the zero syndrome."""
    prof = dimension_profile(code, order)
    n, r = code.n, code.n - code.k
    if r > MAX_SYNDROME_BITS or prof.max_state > MAX_STATE_BITS:
        raise TrellisCapacityError(
            f"{code.name}: n-k={r}, max state {prof.max_state} exceeds the build limits", prof)
    _, H = _permuted(code, order)
    cols = gf2.pack_columns(H)

    # co-reachable spaces span(h_i, ..., h_{n-1}), built backward
    testers: list[Optional[_SpanTester]] = [None] * (n + 1)
    basis = gf2.XorBasis()
    testers[n] = _SpanTester([])
    for i in range(n - 1, -1, -1):
        basis.insert(cols[i])
        testers[i] = _SpanTester(basis.vectors())

    states = [np.zeros(1, dtype=np.int64)]
    pred0, pred1 = [], []
    for i in range(n):
        cur = states[i]
        c0, c1 = cur, cur ^ cols[i]
        k0 = testers[i + 1].contains(c0)
        k1 = testers[i + 1].contains(c1)
        nxt = np.unique(np.concatenate([c0[k0], c1[k1]]))
        p0 = np.full(len(nxt), -1, dtype=np.int64)
        p1 = np.full(len(nxt), -1, dtype=np.int64)
        src = np.arange(len(cur))
        p0[np.searchsorted(nxt, c0[k0])] = src[k0]
        p1[np.searchsorted(nxt, c1[k1])] = src[k1]
        states.append(nxt)
        pred0.append(p0)
        pred1.append(p1)

    t = Trellis(n=n, k=code.k, order=order, profile=prof, states=states, pred0=pred0, pred1=pred1)
    expected = (1 << prof.s).tolist()
    if t.vertex_counts != expected:
        raise InvariantError(f"vertex counts {t.vertex_counts} != 2^s {expected}")
    return t


@dataclass(frozen=True)
class ComplexityReport:
    edges: int
    vertices: int
    k: int

    @property
    def additions(self) -> int:
        return self.edges

    @property
    def comparisons(self) -> int:
        return self.edges - self.vertices + 1

    @property
    def viterbi_total(self) -> int:
        return 2 * self.edges - self.vertices + 1

    @property
    def additions_per_bit(self) -> float:
        return self.additions / self.k

    @property
    def comparisons_per_bit(self) -> float:
        return self.comparisons / self.k

    @property
    def total_per_bit(self) -> float:
        return self.viterbi_total / self.k

    def to_json(self) -> dict:
        return {
            "edges": self.edges, "vertices": self.vertices, "k": self.k,
            "additions": self.additions, "comparisons": self.comparisons,
            "viterbi_total": self.viterbi_total,
            "additions_per_bit": round(self.additions_per_bit),
            "comparisons_per_bit": round(self.comparisons_per_bit),
            "total_per_bit": round(self.total_per_bit),
        }


def complexity(trellis: Trellis, k: Optional[int] = None) -> ComplexityReport:
    return ComplexityReport(trellis.num_edges, trellis.num_vertices, trellis.k if k is None else k)


def analytic_counts(profile: DimensionProfile) -> tuple[int, int]:
    """(|E|, |V|) of the minimal trellis from the profile alone.

    The section leaving level i has 2^(k - p_i - f_{i+1}) edges.
    """
    k = profile.k
    V = int((1 << profile.s).sum())
    E = int(sum(1 << int(k - profile.p_short[i] - profile.f_short[i + 1]) for i in range(profile.n)))
    return E, V


# -- Viterbi -------------------------------------------------------------------

def awgn_branch_metrics(y) -> np.ndarray:
    """Squared Euclidean branch metrics for BPSK (bit 0 -> +1, bit 1 -> -1)."""
    y = np.asarray(y, dtype=float)
    return np.stack([(y - 1.0) ** 2, (y + 1.0) ** 2], axis=-1)


def viterbi_decode(trellis: Trellis, metrics, batch_limit: int = 1 << 25) -> np.ndarray:
    """Min-sum Viterbi decoding.

    Parameters
    ----------
    trellis : Trellis
    metrics : array, shape (n, 2) or (B, n, 2)
        ``metrics[..., j, b]`` is the cost of bit b at original coordinate j.
    batch_limit : int
        Upper bound on stored survivor decisions per chunk.

    Returns
    -------
    np.ndarray
        Codeword(s) of minimal total metric, shape (n,) or (B, n). On equal
        survivor metrics the 0-labelled incoming edge wins.
    """
    bm = np.asarray(metrics, dtype=float)
    single = bm.ndim == 2
    if single:
        bm = bm[None]
    if bm.shape[1:] != (trellis.n, 2):
        raise ValueError(f"metrics must have shape (..., {trellis.n}, 2)")
    if trellis.order is not None:
        bm = bm[:, list(trellis.order.perm), :]
    per_word = max(1, trellis.num_vertices)
    chunk = max(1, batch_limit // per_word)
    out = np.empty((bm.shape[0], trellis.n), dtype=np.uint8)
    for s in range(0, bm.shape[0], chunk):
        out[s:s + chunk] = _viterbi_chunk(trellis, bm[s:s + chunk])
    out = apply_order(out, trellis.order, inverse=True)
    return out[0] if single else out


def _viterbi_chunk(t: Trellis, bm: np.ndarray) -> np.ndarray:
    B = bm.shape[0]
    metric = np.zeros((B, 1))
    choices = []
    inf_col = np.full((B, 1), np.inf)
    for i in range(t.n):
        ext = np.concatenate([metric, inf_col], axis=1)
        c0 = ext[:, t.pred0[i]] + bm[:, i, 0:1]
        c1 = ext[:, t.pred1[i]] + bm[:, i, 1:2]
        take1 = c1 < c0
        metric = np.where(take1, c1, c0)
        choices.append(take1)
    bits = np.empty((B, t.n), dtype=np.uint8)
    v = np.zeros(B, dtype=np.int64)
    rows = np.arange(B)
    for i in range(t.n - 1, -1, -1):
        b = choices[i][rows, v]
        bits[:, i] = b
        v = np.where(b, t.pred1[i][v], t.pred0[i][v])
    return bits


# -- analytic bounds -------------------------------------------------------------

def _punct_dim(zeros: ZeroSet, x: int) -> int:
    """Dimension of the length-x punctured codes, from the zeros alone."""
    n = zeros.n
    return x - sum(all(lam in zeros for lam in range(a, n, x)) for a in range(x))


def _short_dim(zeros: ZeroSet, x: int) -> int:
    """Dimension of the length-x shortened codes, from the zeros alone."""
    return x - len({lam % x for lam in zeros})


def _anchor_values(zeros: ZeroSet, chain: Chain) -> dict[int, int]:
    """Known punctured prefix dimensions p^i at the chain anchors."""
    n = zeros.n
    k = n - len(zeros)
    vals = {0: 0, n: k}
    for x in chain:
        vals[x] = _punct_dim(zeros, x)
        vals[n - x] = k - _short_dim(zeros, x)
    return vals


def _phi(zeros: ZeroSet, chain: Chain) -> np.ndarray:
    """Pointwise-largest sequence consistent with the known anchors, unit
    steps, aligned-block growth limits and the cap k."""
    n = zeros.n
    k = n - len(zeros)
    anchors = _anchor_values(zeros, chain)
    z = n + 1
    edges: list[tuple[int, int, int]] = []  # (u, v, w): phi_v <= phi_u + w
    for i in range(n):
        edges.append((i, i + 1, 1))
        edges.append((i + 1, i, 0))
    for x in chain:
        p_up = anchors[x]
        for start in range(0, n, x):
            edges.append((start, start + x, p_up))
    for i in range(n + 1):
        edges.append((z, i, k))
        edges.append((i, z, 0))
    for a, val in anchors.items():
        edges.append((z, a, val))
        edges.append((a, z, -val))

    dist = np.full(n + 2, np.inf)
    dist[z] = 0
    for _ in range(n + 2):
        changed = False
        for u, v, w in edges:
            if dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
                changed = True
        if not changed:
            break
    else:
        raise InvariantError("anchor constraints are infeasible")
    return dist[: n + 1].astype(np.int64)


@dataclass(frozen=True)
class ProfileBound:
    mu: np.ndarray
    mu_dual: np.ndarray

    @property
    def bound(self) -> np.ndarray:
        return np.maximum(np.minimum(self.mu, self.mu_dual), 0)


def profile_upper_bound(code_or_zeros, chain: Sequence[int] | Chain) -> ProfileBound:
    """Upper bound on s_i from the zeros of the code and of its dual."""
    zeros = code_or_zeros.zeros if isinstance(code_or_zeros, CyclicCode) else code_or_zeros
    n = zeros.n
    ch = chain if isinstance(chain, Chain) else Chain(n, tuple(chain))

    def mu_of(zs: ZeroSet) -> np.ndarray:
        kk = n - len(zs)
        phi = _phi(zs, ch)
        return phi + phi[::-1] - kk

    return ProfileBound(mu_of(zeros), mu_of(dual_zeros(zeros)))


def max_state_bound(code_or_zeros, chain: Sequence[int] | Chain) -> int:
    """Closed-form bound on max_i s_i for a chain-ordered cyclic code."""
    zeros = code_or_zeros.zeros if isinstance(code_or_zeros, CyclicCode) else code_or_zeros
    n = zeros.n
    k = n - len(zeros)
    ch = chain if isinstance(chain, Chain) else Chain(n, tuple(chain))
    xs = ch.extended
    if not ch.elements:
        return min(k, n - k)
    third = xs[0] - k
    fourth = xs[0] - (n - k)
    for x, x_next in zip(xs, xs[1:]):
        third += (x_next // x - 1) * _punct_dim(zeros, x)
        fourth += (x_next // x - 1) * (x - _short_dim(zeros, x))
    return min(k, n - k, third, fourth)


def state_drop(old: CyclicCode, new: CyclicCode, x: int, order: GammaOrdering) -> int:
    """s_x(old) - s_x(new), checked against the drop at n - x and the number
    of added trains meeting the old zeros."""
    from .locality import count_intersecting_trains

    if x not in order.chain.elements:
        raise ValueError(f"{x} is not in the ordering's chain {order.chain.elements}")
    s_old = dimension_profile(old, order).s
    s_new = dimension_profile(new, order).s
    n = old.n
    drop = int(s_old[x] - s_new[x])
    drop_mirror = int(s_old[n - x] - s_new[n - x])
    m_x = count_intersecting_trains(old, new, x)
    if not drop == drop_mirror == m_x:
        raise InvariantError(f"drops {drop}, {drop_mirror} and m_{x}={m_x} disagree")
    return drop


# -- exports -------------------------------------------------------------------

PROFILE_COLUMNS = ["i", "p_short", "f_short", "p_punct", "f_punct", "s", "mu", "mu_dual"]


def profile_csv(profile: DimensionProfile, bound: Optional[ProfileBound] = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PROFILE_COLUMNS)
    for i in range(profile.n + 1):
        row = [i, profile.p_short[i], profile.f_short[i], profile.p_punct[i], profile.f_punct[i],
               profile.s[i]]
        row += [bound.mu[i], bound.mu_dual[i]] if bound is not None else ["", ""]
        w.writerow([int(v) if v != "" else v for v in row])
    return buf.getvalue()


def export_trellis(trellis: Trellis, path) -> None:
    with open(path, "w") as fh:
        json.dump(trellis.to_json(), fh)
