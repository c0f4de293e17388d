"""Monte-Carlo link simulator: an independent oracle for the closed forms.

Each trial replays the three-phase protocol at SINR level — draw fading
gains, evaluate every decoding stage against its threshold, record the
two outage events — and the estimator averages over trials.

Determinism contract: (seed, trials, chunk_size) fully determine every
estimate regardless of worker count.  Trials are numbered globally and
each trial owns a fixed-width slice of a counter-based random stream
(Philox keyed by the seed), so any partition of the trial range into
chunks replays bit-identical gains.  Chunk results are integer counts
reduced in chunk order, which is exact arithmetic, hence worker-count
independent.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analytic import throughput
from .linklevel import (ChannelRealization, Geometry, SystemConfig,
                        sinr_direct_weak, sinr_relayed, sinr_strong_decodes_weak,
                        snr_strong_own)

MODES = ("joint", "independent")

# Philox advances in blocks of four 64-bit words and one uniform double
# consumes one word, so per-trial draw budgets are padded to a multiple
# of 4 to keep every trial block-aligned.
_PHILOX_BLOCK = 4


@dataclass(frozen=True)
class McConfig:
    """Simulation parameters.

    mode selects how the two scheduled users' direct gains are drawn:
    "joint" reads both ranks from one ordered vector (the physical
    channel), "independent" draws a second vector for the strong user so
    the two ranks are statistically independent — the assumption baked
    into the weak-user closed form.  "independent-marginals" is accepted
    as an alias.
    """

    trials: int
    seed: int
    mode: str = "independent"
    chunk_size: int = 65536

    def __post_init__(self) -> None:
        if not (isinstance(self.trials, (int, np.integer)) and self.trials >= 1):
            raise ValueError(f"trials must be a positive integer, got {self.trials!r}")
        if not (isinstance(self.seed, (int, np.integer)) and 0 <= self.seed < 2 ** 64):
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if not (isinstance(self.chunk_size, (int, np.integer)) and self.chunk_size >= 1):
            raise ValueError(f"chunk_size must be a positive integer, got {self.chunk_size!r}")
        mode = "independent" if self.mode == "independent-marginals" else self.mode
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        object.__setattr__(self, "mode", mode)


@dataclass(frozen=True)
class McEstimate:
    """A binomial proportion estimate with its plug-in standard error."""

    p_hat: float
    stderr: float
    trials: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_hat <= 1.0:
            raise ValueError(f"p_hat must lie in [0, 1], got {self.p_hat}")
        if not (isinstance(self.trials, (int, np.integer)) and self.trials >= 1):
            raise ValueError(f"trials must be a positive integer, got {self.trials!r}")
        want = math.sqrt(self.p_hat * (1.0 - self.p_hat) / self.trials)
        if abs(self.stderr - want) > 1e-12:
            raise ValueError(
                f"stderr={self.stderr} inconsistent with p_hat and trials (expected {want})")


def draws_per_trial(M: int, mode: str) -> int:
    """Uniform doubles consumed by one trial (block-aligned; see module notes).

    Joint mode needs M direct gains plus the two relay hops; independent
    mode needs a second M-vector.  The count is rounded up to a multiple
    of 4 so consecutive trials start on Philox block boundaries.
    """
    need = (M + 2) if mode == "joint" else (2 * M + 2)
    return -(-need // _PHILOX_BLOCK) * _PHILOX_BLOCK


def trial_stream(mc: McConfig, M: int, trial: int) -> np.random.Generator:
    """Random stream positioned at the first draw of the given trial index.

    Consuming draws_per_trial(M, mc.mode) uniforms from the returned
    generator reproduces exactly what any chunked run feeds that trial.
    """
    if not 0 <= trial:
        raise ValueError(f"trial index must be >= 0, got {trial}")
    bg = np.random.Philox(key=mc.seed)
    bg.advance(trial * draws_per_trial(M, mc.mode) // _PHILOX_BLOCK)
    return np.random.Generator(bg)


def _gains_from_uniforms(cfg: SystemConfig, mode: str, u: np.ndarray):
    """Map a (count, draws_per_trial) uniform block to per-trial gains.

    Exponential variates use the inverse CDF -lam*log1p(-u): exactly one
    uniform per variate, which keeps the per-trial draw layout fixed.
    Returns (ordered weak-read vector, ordered strong-read vector or
    None, g_dnr, g_rdm).
    """
    M = cfg.M
    vec1 = np.sort(-cfg.lambda_sd * np.log1p(-u[:, :M]), axis=1)
    if mode == "joint":
        vec2 = None
        off = M
    else:
        vec2 = np.sort(-cfg.lambda_sd * np.log1p(-u[:, M:2 * M]), axis=1)
        off = 2 * M
    g_dnr = -cfg.lambda_dnr * np.log1p(-u[:, off])
    g_rdm = -cfg.lambda_rdm * np.log1p(-u[:, off + 1])
    return vec1, vec2, g_dnr, g_rdm


def draw_realization(cfg: SystemConfig, mc: McConfig, rng: np.random.Generator) -> ChannelRealization:
    """Draw one channel realization, consuming one trial's worth of stream."""
    u = rng.random((1, draws_per_trial(cfg.M, mc.mode)))
    vec1, vec2, g_dnr, g_rdm = _gains_from_uniforms(cfg, mc.mode, u)
    return ChannelRealization(g_sd=vec1[0], g_dnr=float(g_dnr[0]), g_rdm=float(g_rdm[0]),
                              g_sd_strong=None if vec2 is None else vec2[0])


def _event_arrays(cfg: SystemConfig, geo: Geometry, g_m, g_n, g_dnr, g_rdm,
                  relay: bool = True):
    """Vectorized outage indicators for both users.

    The strong user fails if either SIC stage misses its threshold.  The
    weak user is in outage when the strong user's SIC stage failed
    (nothing is forwarded), or when both its own copies — direct and
    relayed — fail; with relay=False the relayed copy is never available.
    """
    fail_sic = sinr_strong_decodes_weak(cfg, geo, g_n) < cfg.gamma_thm
    out_n = fail_sic | (snr_strong_own(cfg, geo, g_n) < cfg.gamma_thn)
    fail_direct = sinr_direct_weak(cfg, geo, g_m) < cfg.gamma_thm
    if relay:
        fail_relay = sinr_relayed(cfg, geo, g_dnr, g_rdm) < cfg.gamma_thm
        out_m = fail_sic | (~fail_sic & fail_direct & fail_relay)
    else:
        out_m = fail_sic | (~fail_sic & fail_direct)
    return out_n, out_m


def outage_events(cfg: SystemConfig, geo: Geometry, real: ChannelRealization) -> tuple[bool, bool]:
    """Evaluate the two outage events for one realization."""
    out_n, out_m = _event_arrays(
        cfg, geo,
        np.atleast_1d(real.gain_weak(cfg.m)), np.atleast_1d(real.gain_strong(cfg.n)),
        np.atleast_1d(real.g_dnr), np.atleast_1d(real.g_rdm))
    return bool(out_n[0]), bool(out_m[0])


def _run_chunk(cfg: SystemConfig, geo: Geometry, mc: McConfig, start: int, count: int,
               relay: bool) -> tuple[int, int]:
    rng = trial_stream(mc, cfg.M, start)
    u = rng.random((count, draws_per_trial(cfg.M, mc.mode)))
    vec1, vec2, g_dnr, g_rdm = _gains_from_uniforms(cfg, mc.mode, u)
    g_m = vec1[:, cfg.m - 1]
    g_n = (vec1 if vec2 is None else vec2)[:, cfg.n - 1]
    out_n, out_m = _event_arrays(cfg, geo, g_m, g_n, g_dnr, g_rdm, relay)
    return int(out_n.sum()), int(out_m.sum())


def estimate(cfg: SystemConfig, geo: Geometry, mc: McConfig, *, workers: int = 1,
             relay: bool = True) -> tuple[McEstimate, McEstimate, float]:
    """Estimate both outage probabilities and the throughput they imply.

    Returns (strong-user estimate, weak-user estimate, throughput).
    Results are bit-identical for fixed (seed, trials, chunk_size)
    whatever ``workers`` is; see the module docstring for why.
    """
    if not (isinstance(workers, (int, np.integer)) and workers >= 1):
        raise ValueError(f"workers must be a positive integer, got {workers!r}")
    chunks = [(start, min(mc.chunk_size, mc.trials - start))
              for start in range(0, mc.trials, mc.chunk_size)]
    if workers == 1 or len(chunks) == 1:
        counts = [_run_chunk(cfg, geo, mc, s, c, relay) for s, c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(lambda sc: _run_chunk(cfg, geo, mc, sc[0], sc[1], relay),
                                   chunks))
    n_fail = sum(c[0] for c in counts)
    m_fail = sum(c[1] for c in counts)
    p_n = n_fail / mc.trials
    p_m = m_fail / mc.trials
    est_n = McEstimate(p_n, math.sqrt(p_n * (1.0 - p_n) / mc.trials), mc.trials)
    est_m = McEstimate(p_m, math.sqrt(p_m * (1.0 - p_m) / mc.trials), mc.trials)
    return est_n, est_m, throughput(cfg, p_n, p_m)
