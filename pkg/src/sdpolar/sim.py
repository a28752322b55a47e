"""Monte Carlo BER/FER sweeps with common random numbers across decoders.

Trial ``t`` of a sweep draws its payload and noise from a stream keyed by
(seed, t) only, so every decoder and every Eb/N0 point sees the same payload
and the same standard-normal noise vector (scaled by the point's sigma).
Cells (decoder, Eb/N0) are independent work items; each is simulated in
trial order and stops at the first trial where the frame-error target is
reached, which makes the result independent of block size and worker count.
"""

from __future__ import annotations

import csv
import io
import json
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.stats import binomtest

from .channel import ChannelParams, channel_ll, trial_rng
from .code import CodeSpec, attach_crc, construct, encode, place_info, read_frozen
from .crc import CRC32C
from .kernels import APPROX, EXACT
from .listdec import PruneConfig, ca_scl_decode, scl_decode, sdscl_decode
from .sc import sc_decode
from .symbol import sdsc_decode

CSV_HEADER = ("decoder", "ebn0_db", "trials", "bit_errors", "frame_errors",
              "ber", "fer", "fer_lo", "fer_hi")


class ConfigError(ValueError):
    """Invalid sweep configuration."""


# -- decoder ids ------------------------------------------------------------------

_ID = re.compile(r"^(sc|sdsc-(\d+)|scl-(\d+)|ca-scl-(\d+)|(ca-)?sdscl-(\d+)-(\d+)-(\d+))$")


@dataclass(frozen=True)
class DecoderSpec:
    name: str
    kind: str
    M: int = 1
    L: int = 1
    q: int | None = None
    crc_select: bool = False

    def decode(self, code: CodeSpec, llr, mode: str = APPROX, pcms: bool = False):
        """Decode a batch; returns (u_hat, crc_pass or None)."""
        if self.kind == "sc":
            return sc_decode(code, llr, mode, pcms), None
        if self.kind == "sdsc":
            return sdsc_decode(code, llr, self.M, mode, pcms), None
        if self.kind == "scl":
            if self.crc_select:
                return ca_scl_decode(code, llr, self.L, mode, pcms)
            return scl_decode(code, llr, self.L, mode, pcms), None
        out = sdscl_decode(code, llr, self.L, self.M, PruneConfig(self.q), mode, pcms,
                           crc_select=self.crc_select)
        return out if self.crc_select else (out, None)


def _pow2(v: int, what: str) -> int:
    if v < 1 or v & (v - 1):
        raise ConfigError(f"{what} must be a power of two, got {v}")
    return v


def parse_decoder(name: str) -> DecoderSpec:
    """Parse ``sc``, ``sdsc-M``, ``scl-L``, ``ca-scl-L``, ``sdscl-M-L-q`` or ``ca-sdscl-M-L-q``."""
    m = _ID.match(name.strip())
    if not m:
        raise ConfigError(f"unknown decoder id {name!r}")
    name = name.strip()
    if name == "sc":
        return DecoderSpec(name, "sc")
    if m.group(2):
        return DecoderSpec(name, "sdsc", M=_pow2(int(m.group(2)), "M"))
    if m.group(3):
        return DecoderSpec(name, "scl", L=_pow2(int(m.group(3)), "L"))
    if m.group(4):
        return DecoderSpec(name, "scl", L=_pow2(int(m.group(4)), "L"), crc_select=True)
    q = int(m.group(8))
    if q < 1:
        raise ConfigError("q must be at least 1")
    return DecoderSpec(name, "sdscl", M=_pow2(int(m.group(6)), "M"),
                       L=_pow2(int(m.group(7)), "L"), q=q, crc_select=bool(m.group(5)))


# -- configuration ----------------------------------------------------------------

@dataclass
class SweepConfig:
    n: int = 6
    K: int = 32
    design_param: float = 0.5
    crc: bool = False
    frozen_file: str | None = None
    decoders: tuple[str, ...] = ("sc",)
    ebn0: tuple[float, ...] = (2.0,)
    trials: int = 10000
    target_fe: int = 100
    seed: int = 0
    workers: int = 1
    out: str | None = None
    exact: bool = False
    pcms: bool = False
    block: int = 512
    code: CodeSpec | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.decoders = tuple(self.decoders)
        self.ebn0 = tuple(float(e) for e in self.ebn0)
        if not self.decoders:
            raise ConfigError("no decoder given")
        if not self.ebn0:
            raise ConfigError("no Eb/N0 point given")
        if self.trials < 1:
            raise ConfigError("trial budget must be at least 1")
        if self.target_fe < 0:
            raise ConfigError("frame-error target must be non-negative")
        if self.workers < 1:
            raise ConfigError("worker count must be at least 1")
        if self.block < 1:
            raise ConfigError("block size must be at least 1")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if self.code is None:
            self.code = self._build_code()
        if self.code.payload_len < 1:
            raise ConfigError("code carries no information bits")
        for d in self.decoder_specs:
            if d.M > self.code.N or self.code.N % d.M:
                raise ConfigError(f"{d.name}: M must divide N = {self.code.N}")
            if d.crc_select and self.code.crc is None:
                raise ConfigError(f"{d.name} needs a CRC-concatenated code (--crc32c)")

    def _build_code(self) -> CodeSpec:
        cfg = CRC32C if self.crc else None
        try:
            if self.frozen_file:
                return read_frozen(self.frozen_file, cfg)
            return construct(self.n, self.K, self.design_param, cfg)
        except OSError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def decoder_specs(self) -> tuple[DecoderSpec, ...]:
        return tuple(parse_decoder(d) for d in self.decoders)

    @property
    def mode(self) -> str:
        return EXACT if self.exact else APPROX

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("code")
        d["decoders"] = list(self.decoders)
        d["ebn0"] = list(self.ebn0)
        d["N"] = self.code.N
        d["K"] = self.code.K
        d["payload_len"] = self.code.payload_len
        d["frozen_set"] = list(self.code.frozen_set)
        return d


# -- trials -----------------------------------------------------------------------

@dataclass(frozen=True)
class TrialRecord:
    trial: int
    seed: int
    ebn0_db: float
    decoder: str
    bit_errors: int
    frame_error: int
    crc_pass: bool | None = None


def trial_inputs(code: CodeSpec, seed: int, trials) -> tuple[np.ndarray, np.ndarray]:
    """Payload bits (T, payload_len) and unit-variance noise (T, N) for the given trial indices."""
    payload = np.empty((len(trials), code.payload_len), dtype=np.uint8)
    noise = np.empty((len(trials), code.N))
    for r, t in enumerate(trials):
        rng = trial_rng(seed, int(t))
        payload[r] = rng.integers(0, 2, code.payload_len, dtype=np.uint8)
        noise[r] = rng.standard_normal(code.N)
    return payload, noise


def received_ll(code: CodeSpec, payload, noise, ebn0_db: float):
    info = attach_crc(code, payload) if code.crc is not None else payload
    x = encode(code, place_info(code, info))
    p = ChannelParams(ebn0_db, code.K / code.N)
    y = (1.0 - 2.0 * x) + np.sqrt(p.sigma2) * noise
    return channel_ll(y, p)


def _errors(code: CodeSpec, payload, u_hat):
    got = u_hat[:, code.info_positions][:, : code.payload_len]
    bit_errors = (got != payload).sum(axis=1)
    return bit_errors, (bit_errors > 0).astype(np.int64)


def trial_records(cfg: SweepConfig, decoder: str, ebn0_db: float, trials) -> list[TrialRecord]:
    """Per-trial outcomes for explicit trial indices (no early stopping)."""
    code = cfg.code
    dec = parse_decoder(decoder)
    payload, noise = trial_inputs(code, cfg.seed, trials)
    u_hat, crc_pass = dec.decode(code, received_ll(code, payload, noise, ebn0_db), cfg.mode, cfg.pcms)
    be, fe = _errors(code, payload, u_hat)
    return [TrialRecord(int(t), cfg.seed, float(ebn0_db), dec.name, int(be[r]), int(fe[r]),
                        None if crc_pass is None else bool(crc_pass[r]))
            for r, t in enumerate(trials)]


@dataclass(frozen=True)
class CellResult:
    decoder: str
    ebn0_db: float
    trials: int
    bit_errors: int
    frame_errors: int
    payload_len: int

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.payload_len * self.trials)

    @property
    def fer(self) -> float:
        return self.frame_errors / self.trials

    def fer_interval(self, level: float = 0.95) -> tuple[float, float]:
        return wilson_interval(self.frame_errors, self.trials, level)

    def row(self) -> list[str]:
        lo, hi = self.fer_interval()
        return [self.decoder, f"{self.ebn0_db:g}", str(self.trials), str(self.bit_errors),
                str(self.frame_errors), f"{self.ber:.6e}", f"{self.fer:.6e}",
                f"{lo:.6e}", f"{hi:.6e}"]


def wilson_interval(k: int, n: int, level: float = 0.95) -> tuple[float, float]:
    ci = binomtest(k, n).proportion_ci(confidence_level=level, method="wilson")
    return float(ci.low), float(ci.high)


def run_cell(cfg: SweepConfig, decoder: str, ebn0_db: float) -> CellResult:
    code = cfg.code
    dec = parse_decoder(decoder)
    done = bit_errors = frame_errors = 0
    while done < cfg.trials:
        idx = np.arange(done, min(done + cfg.block, cfg.trials))
        payload, noise = trial_inputs(code, cfg.seed, idx)
        u_hat, _ = dec.decode(code, received_ll(code, payload, noise, ebn0_db), cfg.mode, cfg.pcms)
        be, fe = _errors(code, payload, u_hat)
        if cfg.target_fe > 0 and frame_errors + fe.sum() >= cfg.target_fe:
            # stop exactly at the trial that reaches the target
            cut = int(np.searchsorted(np.cumsum(fe), cfg.target_fe - frame_errors)) + 1
            be, fe = be[:cut], fe[:cut]
            done += cut
            bit_errors += int(be.sum())
            frame_errors += int(fe.sum())
            break
        done += idx.size
        bit_errors += int(be.sum())
        frame_errors += int(fe.sum())
    return CellResult(dec.name, float(ebn0_db), done, bit_errors, frame_errors, code.payload_len)


def _cell_job(args):
    cfg, decoder, ebn0 = args
    return run_cell(cfg, decoder, ebn0)


def run_sweep(cfg: SweepConfig) -> list[CellResult]:
    """Simulate every (decoder, Eb/N0) cell; writes CSV + JSON when ``cfg.out`` is set."""
    if cfg.out and not Path(cfg.out).resolve().parent.is_dir():
        raise FileNotFoundError(f"output directory of {cfg.out} does not exist")
    jobs = [(cfg, d, e) for d in cfg.decoders for e in cfg.ebn0]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(cfg.workers, len(jobs))) as pool:
            results = list(pool.map(_cell_job, jobs))
    else:
        results = [_cell_job(j) for j in jobs]
    if cfg.out:
        write_results(cfg, results, cfg.out)
    return results


def results_csv(results) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in results:
        w.writerow(r.row())
    return buf.getvalue()


def sidecar_path(out) -> Path:
    out = Path(out)
    return out.with_name(out.name + ".json")


def write_results(cfg: SweepConfig, results, out) -> None:
    out = Path(out)
    out.write_text(results_csv(results))
    meta = {"config": cfg.to_dict(), "code_fingerprint": cfg.code.fingerprint(),
            "columns": list(CSV_HEADER)}
    sidecar_path(out).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
