"""Monte Carlo FER/BER sweeps with per-trial seeding."""

from __future__ import annotations

import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .cyclic import SpecError, code_from_spec, load_code, load_json
from .locosd import (LocalStructure, StructureError, locality_aware_decode, qmld,
                     structure_from_json)
from .ordering import gamma_order, identity_order
from .osd import OsdConfig, osd_decode, snr_to_n0
from .trellis import awgn_branch_metrics, build_trellis, viterbi_decode

CSV_VERSION = 1
CSV_COLUMNS = ("snr_db", "convention", "trials", "frame_errs", "bit_errs", "fer", "ber",
               "qmld_rate", "mean_candidates", "seconds")
SCHEMES = ("osd", "locosd", "viterbi", "qmld")
BLOCK = 256


class ConfigError(ValueError):
    """Simulation description that cannot be run."""


@dataclass(frozen=True, eq=False)
class SimSpec:
    code: object = dc_field(repr=False)
    scheme: str
    snr_db: tuple[float, ...]
    convention: str = "es"
    order: int = 0
    structure: Optional[LocalStructure] = dc_field(default=None, repr=False)
    chain: tuple[int, ...] = ()
    max_trials: int = 10_000
    max_frame_errors: Optional[int] = 100
    seed: int = 0
    score_on: str = "y"

    def __post_init__(self) -> None:
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if not self.snr_db:
            raise ConfigError("SNR list is empty")
        if self.max_trials < 1:
            raise ConfigError("max_trials must be at least 1")
        if self.convention not in ("es", "eb"):
            raise ConfigError(f"unknown SNR convention {self.convention!r}")
        if self.scheme in ("locosd", "qmld"):
            if self.structure is None:
                raise ConfigError(f"scheme {self.scheme} needs a local structure")
            if self.structure.n != self.code.n:
                raise ConfigError("structure and code lengths differ")
            if self.scheme == "qmld" and self.structure.variant == "availability":
                raise ConfigError("quick-look decoding needs SPC groups or middle codes")

    @property
    def rate(self) -> float:
        return self.code.k / self.code.n

    def n0(self, snr_db: float) -> float:
        return snr_to_n0(snr_db, self.convention, self.rate)


@dataclass(frozen=True)
class SimRecord:
    n: int
    snr_db: float
    convention: str
    trials: int
    frame_errs: int
    bit_errs: int
    qmld_successes: int
    candidates: int
    seconds: float

    @property
    def fer(self) -> float:
        return self.frame_errs / self.trials

    @property
    def ber(self) -> float:
        return self.bit_errs / (self.trials * self.n)

    @property
    def qmld_rate(self) -> float:
        return self.qmld_successes / self.trials

    @property
    def mean_candidates(self) -> float:
        return self.candidates / self.trials

    def fer_interval(self, z: float = 1.96) -> tuple[float, float]:
        """Wilson score interval for the FER."""
        return wilson_interval(self.frame_errs, self.trials, z)


def wilson_interval(k: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    if trials <= 0:
        return 0.0, 1.0
    p = k / trials
    den = 1 + z * z / trials
    mid = (p + z * z / (2 * trials)) / den
    half = z * np.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / den
    return float(max(0.0, mid - half)), float(min(1.0, mid + half))


def trial_noise(seed: int, snr_index: int, trials: Sequence[int], n: int, sigma: float
                ) -> np.ndarray:
    """Noise rows; row j depends only on (seed, snr_index, trials[j])."""
    out = np.empty((len(trials), n))
    for j, t in enumerate(trials):
        out[j] = np.random.default_rng([seed, snr_index, int(t)]).normal(0.0, sigma, n)
    return out


Decoder = Callable[[np.ndarray, float], tuple[np.ndarray, np.ndarray, np.ndarray]]


def make_decoder(spec: SimSpec) -> Decoder:
    """Batch decoder returning (words, stage-1 successes, candidates per word)."""
    code = spec.code
    if spec.scheme == "viterbi":
        order = (gamma_order(code.n, spec.chain) if spec.chain else identity_order(code.n))
        trellis = build_trellis(code, order)

        def viterbi(y, n0):
            words = viterbi_decode(trellis, awgn_branch_metrics(y))
            z = np.zeros(len(y), dtype=np.int64)
            return words, z.astype(bool), z

        return viterbi
    if spec.scheme == "qmld":
        def quick(y, n0):
            words, ok = qmld(spec.structure, y)
            return words, np.asarray(ok, dtype=bool), np.zeros(len(y), dtype=np.int64)

        return quick
    cfg = OsdConfig(spec.order)

    def per_word(y, n0):
        words = np.empty(y.shape, dtype=np.uint8)
        ok = np.zeros(len(y), dtype=bool)
        cand = np.zeros(len(y), dtype=np.int64)
        for j, row in enumerate(y):
            if spec.scheme == "osd":
                res = osd_decode(code, row, cfg, score_on=spec.score_on)
            else:
                res = locality_aware_decode(code, spec.structure, row, cfg, n0, spec.score_on)
            words[j] = res.codeword
            ok[j] = res.stage == "QMLD"
            cand[j] = res.candidates
        return words, ok, cand

    return per_word


def _run_block(spec: SimSpec, decoder: Decoder, snr_index: int, start: int, stop: int):
    n0 = spec.n0(spec.snr_db[snr_index])
    sigma = float(np.sqrt(n0 / 2.0))
    t0 = time.perf_counter()
    noise = trial_noise(spec.seed, snr_index, range(start, stop), spec.code.n, sigma)
    y = 1.0 + noise  # all-zero codeword
    words, ok, cand = decoder(y, n0)
    errs = words.sum(axis=1).astype(np.int64)
    return errs, ok, cand, time.perf_counter() - t0


_WORKER: Optional[tuple[SimSpec, Decoder]] = None


def _init_worker(spec: SimSpec) -> None:
    global _WORKER
    _WORKER = (spec, make_decoder(spec))


def _worker_block(args):
    return _run_block(*_WORKER, *args)


def run_sim(spec: SimSpec, workers: int = 1, block: int = BLOCK) -> list[SimRecord]:
    """Sweep the SNR grid, stopping each point at max_trials or max_frame_errors.

    Trials run in fixed blocks and the stopping rule is applied block by
    block in trial order, so the records do not depend on ``workers``.
    """
    decoder = make_decoder(spec)  # fails before any trial
    records = []
    pool = (ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(spec,))
            if workers > 1 else None)
    try:
        for si, snr in enumerate(spec.snr_db):
            t0 = time.perf_counter()
            starts = list(range(0, spec.max_trials, block))
            trials = frames = bits = succ = cand = 0
            pos = 0
            done = False
            while pos < len(starts) and not done:
                batch = starts[pos:pos + max(1, workers)]
                jobs = [(si, s, min(s + block, spec.max_trials)) for s in batch]
                if pool is None:
                    results = [_run_block(spec, decoder, *j) for j in jobs]
                else:
                    results = list(pool.map(_worker_block, jobs))
                for errs, ok, cs, _ in results:
                    trials += len(errs)
                    frames += int((errs > 0).sum())
                    bits += int(errs.sum())
                    succ += int(ok.sum())
                    cand += int(cs.sum())
                    if spec.max_frame_errors is not None and frames >= spec.max_frame_errors:
                        done = True
                        break
                pos += len(batch)
            records.append(SimRecord(spec.code.n, float(snr), spec.convention, trials, frames,
                                     bits, succ, cand, time.perf_counter() - t0))
    finally:
        if pool is not None:
            pool.shutdown()
    return records


def records_csv(records: Sequence[SimRecord], timing: bool = True) -> str:
    """CSV text with a versioned header comment; ``timing=False`` blanks the seconds column."""
    buf = io.StringIO()
    buf.write(f"# cycloc-sim v{CSV_VERSION}\n")
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for r in records:
        secs = f"{r.seconds:.3f}" if timing else ""
        buf.write(f"{r.snr_db:g},{r.convention},{r.trials},{r.frame_errs},{r.bit_errs},"
                  f"{r.fer:.6g},{r.ber:.6g},{r.qmld_rate:.6g},{r.mean_candidates:.6g},{secs}\n")
    return buf.getvalue()


def write_csv(records: Sequence[SimRecord], path: Union[str, Path], timing: bool = True) -> None:
    Path(path).write_text(records_csv(records, timing))


def spec_from_json(data: dict, base_dir: Union[str, Path, None] = None) -> SimSpec:
    """Build a SimSpec from a sim description.

    ``code`` is an inline code spec or a path to one; ``structure`` is an
    inline structure description or a path. Other keys: scheme, order,
    snr_db, convention, max_trials, max_frame_errors, seed, chain, score_on.
    """
    base = Path(base_dir) if base_dir is not None else Path(".")

    def resolve(p):
        p = Path(p)
        return p if p.is_absolute() else base / p

    try:
        code_ref = data["code"]
        code = load_code(resolve(code_ref)) if isinstance(code_ref, str) else code_from_spec(code_ref)
        structure = None
        sref = data.get("structure")
        if isinstance(sref, str):
            sp = resolve(sref)
            structure = structure_from_json(code, load_json(sp), sp.parent)
        elif isinstance(sref, dict):
            structure = structure_from_json(code, sref, base)
        snr = data["snr_db"]
        snr = tuple(float(s) for s in (snr if isinstance(snr, list) else [snr]))
        mfe = data.get("max_frame_errors", 100)
        return SimSpec(
            code=code, scheme=data.get("scheme", "osd"), snr_db=snr,
            convention=data.get("convention", "es"), order=int(data.get("order", 0)),
            structure=structure, chain=tuple(int(x) for x in data.get("chain", [])),
            max_trials=int(data.get("max_trials", 10_000)),
            max_frame_errors=None if mfe is None else int(mfe),
            seed=int(data.get("seed", 0)), score_on=data.get("score_on", "y"),
        )
    except KeyError as exc:
        raise ConfigError(f"sim description missing {exc}") from exc
    except (StructureError, SpecError) as exc:
        raise ConfigError(str(exc)) from exc


def load_sim(path: Union[str, Path]) -> SimSpec:
    return spec_from_json(load_json(path), Path(path).parent)
