"""Binary cyclic codes described by their zero sets."""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from math import gcd
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from . import gf2
from .galois import Field, eval_binary_at_powers, get_field, mult_order


class CodeError(ValueError):
    """Invalid code parameters."""


class CapacityError(RuntimeError):
    """A brute-force or table-driven request exceeds the desk-scale limits."""


MAX_ENUM_K = 24
MAX_ENUM_N = 63


@dataclass(frozen=True)
class ZeroSet:
    """Exponents (mod ``n``) at which every codeword vanishes."""

    n: int
    elements: tuple[int, ...]
    _members: frozenset = dc_field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        elems = tuple(sorted({int(e) % self.n for e in self.elements}))
        object.__setattr__(self, "elements", elems)
        object.__setattr__(self, "_members", frozenset(elems))

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, x: int) -> bool:
        return x in self._members

    def as_set(self) -> set[int]:
        return set(self.elements)

    def is_coset_closed(self, q: int = 2) -> bool:
        return all((q * x) % self.n in self._members for x in self.elements)


@dataclass(frozen=True)
class SupportSet:
    """Coordinates {i, i + nu, ..., i + n - nu} with nu = n / n1."""

    n: int
    n1: int
    offset: int

    def __post_init__(self) -> None:
        if self.n1 < 1 or self.n % self.n1:
            raise CodeError(f"{self.n1} does not divide {self.n}")
        if not 0 <= self.offset < self.nu:
            raise CodeError(f"offset {self.offset} outside [0, {self.nu - 1}]")

    @property
    def nu(self) -> int:
        return self.n // self.n1

    @property
    def indices(self) -> list[int]:
        return list(range(self.offset, self.n, self.nu))


def support_sets(n: int, n1: int) -> list[SupportSet]:
    if n1 < 1 or n % n1:
        raise CodeError(f"{n1} does not divide {n}")
    return [SupportSet(n, n1, i) for i in range(n // n1)]


def cyclotomic_coset(q: int, n: int, a: int) -> list[int]:
    """The q-cyclotomic coset of ``a`` modulo ``n``, in generation order."""
    if not 0 <= a < n:
        raise CodeError(f"{a} outside [0, {n - 1}]")
    out = [a]
    x = (a * q) % n
    while x != a:
        out.append(x)
        x = (x * q) % n
    return out


def coset_closure(n: int, values: Iterable[int], q: int = 2) -> set[int]:
    out: set[int] = set()
    for v in values:
        if v % n not in out:
            out.update(cyclotomic_coset(q, n, v % n))
    return out


def coset_representatives(n: int, values: Iterable[int], q: int = 2) -> list[list[int]]:
    """Cosets partitioning ``values`` (assumed closed), each led by its minimum."""
    remaining = set(values)
    cosets = []
    while remaining:
        a = min(remaining)
        c = cyclotomic_coset(q, n, a)
        cosets.append(c)
        remaining.difference_update(c)
    return cosets


@dataclass(frozen=True, eq=False)
class CyclicCode:
    """An [n, k] binary cyclic code.

    ``alpha_log`` is the log (w.r.t. the field generator) of the primitive
    n-th root of unity used to define the zeros.
    """

    n: int
    q: int
    m: int
    zeros: ZeroSet
    g: np.ndarray = dc_field(repr=False)
    G: np.ndarray = dc_field(repr=False)
    H: np.ndarray = dc_field(repr=False)
    field: Field = dc_field(repr=False)
    alpha_log: int = dc_field(repr=False)

    @property
    def k(self) -> int:
        return self.n - len(self.zeros)

    @property
    def name(self) -> str:
        return f"[{self.n},{self.k}]"

    def __repr__(self) -> str:
        return f"CyclicCode{self.name}"


@dataclass(frozen=True, eq=False)
class LinearCode:
    """A binary linear code given by a full-rank generator matrix.

    Exposes the same ``n``/``k``/``G``/``H`` surface as :class:`CyclicCode`
    for the decoders and trellis code, which never need the zeros.
    """

    G: np.ndarray = dc_field(repr=False)
    H: np.ndarray = dc_field(repr=False)

    @property
    def n(self) -> int:
        return self.G.shape[1]

    @property
    def k(self) -> int:
        return self.G.shape[0]

    @property
    def name(self) -> str:
        return f"[{self.n},{self.k}]"

    def __repr__(self) -> str:
        return f"LinearCode{self.name}"


def linear_code(G) -> LinearCode:
    """Row-reduce ``G`` to a basis and attach a parity-check matrix."""
    Gb = gf2.row_basis(G)
    n = Gb.shape[1]
    H = gf2.nullspace(Gb) if Gb.shape[0] else np.eye(n, dtype=np.uint8)
    Gb.setflags(write=False)
    H.setflags(write=False)
    return LinearCode(Gb, H)


def code_from_zeros(n: int, representatives: Iterable[int], q: int = 2,
                    strict: bool = False) -> CyclicCode:
    """Build the binary cyclic code whose zeros are the cosets of ``representatives``.

    With ``strict=True`` the input must already be closed under x -> q*x mod n.
    """
    if q != 2:
        raise CodeError("only binary cyclic codes are supported")
    if n < 1 or gcd(n, q) != 1:
        raise CodeError(f"length {n} must be coprime to q={q}")
    reps = [int(r) for r in representatives]
    for r in reps:
        if not 0 <= r < n:
            raise CodeError(f"zero {r} outside [0, {n - 1}]")
    zeros = coset_closure(n, reps, q)
    if strict and zeros != set(reps):
        raise CodeError(f"zero set not closed under multiplication by {q} mod {n}")

    m = mult_order(q, n) if n > 1 else 1
    field = get_field(q, m)
    alpha_log = field.order // n

    # g(x) = prod (x - alpha^lam), coefficients as field encodings, low degree first
    g = [1]
    for lam in sorted(zeros):
        root = field.alpha_pow(alpha_log * lam)
        nxt = [0] * (len(g) + 1)
        for i, c in enumerate(g):
            nxt[i + 1] = field.add(nxt[i + 1], c)
            nxt[i] = field.add(nxt[i], field.mul(c, root))
        g = nxt
    if any(c not in (0, 1) for c in g):
        raise CodeError("generator polynomial has coefficients outside GF(2)")
    g_arr = np.asarray(g, dtype=np.uint8)

    k = n - len(zeros)
    G = np.zeros((k, n), dtype=np.uint8)
    for i in range(k):
        G[i, i:i + len(g)] = g_arr
    H = gf2.nullspace(G) if k else np.eye(n, dtype=np.uint8)
    for a in (g_arr, G, H):
        a.setflags(write=False)
    return CyclicCode(n=n, q=q, m=m, zeros=ZeroSet(n, tuple(zeros)), g=g_arr, G=G, H=H,
                      field=field, alpha_log=alpha_log)


def encode(code: CyclicCode, message) -> np.ndarray:
    """message @ G over GF(2); accepts (..., k) arrays."""
    msg = gf2.as_bits(message)
    if msg.shape[-1] != code.k:
        raise CodeError(f"message length {msg.shape[-1]} != k={code.k}")
    return (msg.astype(np.int64) @ code.G.astype(np.int64) % 2).astype(np.uint8)


def syndrome(code: CyclicCode, word) -> np.ndarray:
    w = gf2.as_bits(word)
    if w.shape[-1] != code.n:
        raise CodeError(f"word length {w.shape[-1]} != n={code.n}")
    return (w.astype(np.int64) @ code.H.T.astype(np.int64) % 2).astype(np.uint8)


def contains(code: CyclicCode, word):
    """True iff H w^T = 0. For (B, n) input returns a length-B bool array."""
    s = syndrome(code, word)
    res = ~s.any(axis=-1)
    return bool(res) if np.ndim(res) == 0 else res


def dft(code: CyclicCode, word, exponents: Sequence[int] | None = None) -> np.ndarray:
    """Field encodings of word(alpha^lam) for each requested exponent."""
    lam = range(code.n) if exponents is None else exponents
    return eval_binary_at_powers(code.field, word, code.alpha_log, lam)


def contains_by_dft(code: CyclicCode, word) -> bool:
    vals = dft(code, word, code.zeros.elements)
    return not vals.any()


def dual_zeros(code_or_zeros: Union[CyclicCode, ZeroSet]) -> ZeroSet:
    """Zeros of the dual: negatives of the nonzeros."""
    z = code_or_zeros.zeros if isinstance(code_or_zeros, CyclicCode) else code_or_zeros
    n = z.n
    return ZeroSet(n, tuple((n - lam) % n for lam in range(n) if lam not in z))


def dual_code(code: CyclicCode) -> CyclicCode:
    return code_from_zeros(code.n, dual_zeros(code).elements)


def _check_divisor(n: int, n1: int) -> None:
    if n1 < 1 or n1 >= n or n % n1:
        raise CodeError(f"{n1} is not a proper divisor of {n}")


def shortened_zeros(code: CyclicCode, n1: int) -> ZeroSet:
    """Zeros of the length-n1 shortened codes: each zero reduced mod n1."""
    _check_divisor(code.n, n1)
    return ZeroSet(n1, tuple(lam % n1 for lam in code.zeros))


def punctured_zeros(code: CyclicCode, n1: int) -> ZeroSet:
    """Zeros of the length-n1 punctured codes: residues whose full train is in S(C)."""
    _check_divisor(code.n, n1)
    z = code.zeros
    return ZeroSet(n1, tuple(a for a in range(n1)
                             if all(lam in z for lam in range(a, code.n, n1))))


# -- brute-force structures ---------------------------------------------------

def puncture_generator(G, support: Sequence[int]) -> np.ndarray:
    """Basis of the code punctured to ``support`` (columns kept in given order)."""
    return gf2.row_basis(gf2.as_bits(G)[:, list(support)])


def shorten_generator(G, support: Sequence[int]) -> np.ndarray:
    """Basis of the codewords vanishing off ``support``, restricted to it."""
    G = gf2.as_bits(G)
    n = G.shape[1]
    keep = list(support)
    comp = [c for c in range(n) if c not in set(keep)]
    if not comp:
        return gf2.row_basis(G)
    msgs = gf2.nullspace(G[:, comp].T)
    if msgs.shape[0] == 0:
        return np.zeros((0, len(keep)), dtype=np.uint8)
    words = (msgs.astype(np.int64) @ G.astype(np.int64) % 2).astype(np.uint8)
    return gf2.row_basis(words[:, keep])


def zeros_by_dft(words, n1: int, field: Field, root_log: int) -> set[int]:
    """Exponents lam in [0, n1) with w(beta^lam) = 0 for every given word."""
    words = gf2.as_bits(words).reshape(-1, n1)
    vals = eval_binary_at_powers(field, words, root_log, range(n1))
    return {lam for lam in range(n1) if not vals[:, lam].any()}


def min_distance_bruteforce(code_or_G) -> int:
    """Minimum nonzero weight by enumerating all 2^k codewords (k <= 24, n <= 63)."""
    G = code_or_G.G if isinstance(code_or_G, CyclicCode) else gf2.as_bits(code_or_G)
    k, n = G.shape
    if k > MAX_ENUM_K or n > MAX_ENUM_N:
        raise CapacityError(f"enumeration of a [{n},{k}] code exceeds k<={MAX_ENUM_K}, n<={MAX_ENUM_N}")
    if k == 0:
        raise CodeError("the zero code has no nonzero codewords")
    words = gf2.span_all(G)[1:]
    return int(np.bitwise_count(words).min())


def bch_bound(zeros: ZeroSet) -> int:
    """1 + the longest arithmetic progression in the zero set (mod n1) whose
    step is coprime to n1."""
    n1 = zeros.n
    zs = zeros.as_set()
    if not zs:
        return 1
    best = 0
    for d in range(1, max(n1, 2)):
        if gcd(d, n1) != 1:
            continue
        for start in zs:
            length = 0
            x = start
            while x in zs and length < n1:
                length += 1
                x = (x + d) % n1
            best = max(best, length)
    return best + 1


# -- JSON surfaces ------------------------------------------------------------

class SpecError(ValueError):
    """Malformed code specification file."""


def load_json(path: Union[str, Path]) -> dict:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def code_from_spec(spec: dict) -> CyclicCode:
    try:
        n = int(spec["n"])
        reps = [int(x) for x in spec["zero_representatives"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"code spec needs n and zero_representatives: {exc}") from exc
    return code_from_zeros(n, reps, q=int(spec.get("q", 2)))


def load_code(path: Union[str, Path]) -> CyclicCode:
    return code_from_spec(load_json(path))


def code_report(code: CyclicCode) -> dict:
    return {
        "n": code.n,
        "k": code.k,
        "zeros": list(code.zeros.elements),
        "cosets": coset_representatives(code.n, code.zeros.elements),
        "g_coeffs": [int(c) for c in code.g],
    }
