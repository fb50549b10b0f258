"""Clock-cycle model of the conventional and modified sampler datapaths.

The SeedMem FIFO hands one byte per cycle to the beta latches. In the
conventional datapath a group is three read cycles: beta_i, then beta_i+1
(D1 generated and compared in the same cycle), then beta_i+2 (D2 generated
and compared). The rejecter therefore works two cycles out of three.

The modified datapath has no beta_i+2 latch. A group is two read cycles;
D1 and D2 are both generated once beta_i+1 is latched, D1 is compared in
that cycle and D2 is held in a register and compared in the next one,
alongside the next group's beta_i latch. The rejecter is busy every cycle,
and the last group needs one extra drain cycle.

So ``total_cycles = period * groups + PIPELINE_FILL[variant]`` exactly,
with period 3 / 2 and fill 0 / 1. The SHAKE-128 core is a latency black box
that refills SeedMem a 168-byte block at a time whenever there is room.
"""

from __future__ import annotations

import csv
import io
from collections import deque
from dataclasses import dataclass, field

from .samplers import N, Q, modified_d1, modified_d2
from .xof import RATE_BYTES

VARIANTS = ("conventional", "modified")
GROUP_PERIOD = {"conventional": 3, "modified": 2}
PIPELINE_FILL = {"conventional": 0, "modified": 1}
SEEDMEM_DEPTH = {"conventional": 504, "modified": 336}
SHAKE_CYCLES_PER_BLOCK = 1108

BLOCKS = ("seedmem_ctrl", "beta_i", "beta_i1", "beta_i2", "d1_gen", "d2_gen", "rejecter", "ctrl")


class Starved(RuntimeError):
    """Input bytes ran out before 256 coefficients were accepted."""

    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace


@dataclass
class DatapathConfig:
    variant: str
    data: bytes = b""
    seedmem_depth: int | None = None
    shake_cycles_per_block: int = SHAKE_CYCLES_PER_BLOCK
    record_events: bool = False

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if self.seedmem_depth is None:
            self.seedmem_depth = SEEDMEM_DEPTH[self.variant]
        if self.seedmem_depth < RATE_BYTES:
            raise ValueError("SeedMem must hold at least one squeeze block")
        self.data = bytes(self.data)


@dataclass
class CycleTrace:
    variant: str
    total_cycles: int = 0
    groups: int = 0
    activity: dict = field(default_factory=lambda: dict.fromkeys(BLOCKS, 0))
    idle_cycles: int = 0
    coefficients: list = field(default_factory=list)
    candidates: int = 0
    bytes_read: int = 0
    shake_blocks: int = 0
    max_fifo_fill: int = 0
    events: list | None = None

    @property
    def rejected(self) -> int:
        return self.candidates - len(self.coefficients)

    def events_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("cycle", "block", "action"))
        w.writerows(self.events or ())
        return buf.getvalue()


class _Datapath:
    def __init__(self, cfg: DatapathConfig):
        self.cfg = cfg
        self.trace = CycleTrace(cfg.variant, events=[] if cfg.record_events else None)
        self.fifo = deque()
        self.fed = 0
        self.cycle = 0
        self.rejecter_started = False
        self._refill()

    def _refill(self):
        # SHAKE writes whole blocks into SeedMem while a block still fits
        data, depth = self.cfg.data, self.cfg.seedmem_depth
        while self.fed < len(data) and len(self.fifo) + RATE_BYTES <= depth:
            chunk = data[self.fed:self.fed + RATE_BYTES]
            self.fifo.extend(chunk)
            self.fed += len(chunk)
            self.trace.shake_blocks += 1
        self.trace.max_fifo_fill = max(self.trace.max_fifo_fill, len(self.fifo))

    def log(self, block, action):
        if self.trace.events is not None:
            self.trace.events.append((self.cycle, block, action))

    def busy(self, block):
        self.trace.activity[block] += 1

    def read(self, latch):
        self._refill()
        if not self.fifo:
            raise Starved(f"SeedMem empty at cycle {self.cycle}", self.trace)
        b = self.fifo.popleft()
        self.trace.bytes_read += 1
        self.busy("seedmem_ctrl")
        self.busy(latch)
        self.log("seedmem_ctrl", f"read {b:#04x}")
        self.log(latch, f"latch {b:#04x}")
        return b

    def compare(self, name, d):
        self.busy("rejecter")
        self.rejecter_started = True
        self.trace.candidates += 1
        if d < Q and len(self.trace.coefficients) < N:
            self.trace.coefficients.append(d)
            self.log("rejecter", f"accept {name}={d}")
        else:
            self.log("rejecter", f"reject {name}={d}")

    def end_cycle(self, rejecter_used):
        self.busy("ctrl")
        if self.rejecter_started and not rejecter_used:
            self.trace.idle_cycles += 1
        self.cycle += 1
        self.trace.total_cycles = self.cycle

    @property
    def full(self):
        return len(self.trace.coefficients) >= N


def _run_conventional(dp: _Datapath):
    while not dp.full:
        bi = dp.read("beta_i")
        dp.end_cycle(False)

        bi1 = dp.read("beta_i1")
        dp.busy("d1_gen")
        d1 = bi + 256 * (bi1 % 16)
        dp.log("d1_gen", f"d1={d1}")
        dp.compare("d1", d1)
        dp.end_cycle(True)

        bi2 = dp.read("beta_i2")
        dp.busy("d2_gen")
        d2 = bi1 // 16 + 16 * bi2
        dp.log("d2_gen", f"d2={d2}")
        dp.compare("d2", d2)
        dp.end_cycle(True)
        dp.trace.groups += 1


def _run_modified(dp: _Datapath):
    d2_reg = None
    while True:
        used = False
        if d2_reg is not None:
            dp.compare("d2", d2_reg)
            d2_reg = None
            used = True
        if dp.full:
            # drain cycle: controller holds rd_en low
            dp.end_cycle(used)
            break
        bi = dp.read("beta_i")
        dp.end_cycle(used)

        bi1 = dp.read("beta_i1")
        dp.busy("d1_gen")
        dp.busy("d2_gen")
        d1, d2_reg = modified_d1(bi, bi1), modified_d2(bi, bi1)
        dp.log("d1_gen", f"d1={d1}")
        dp.log("d2_gen", f"d2={d2_reg}")
        dp.compare("d1", d1)
        dp.end_cycle(True)
        dp.trace.groups += 1


def simulate(cfg: DatapathConfig) -> CycleTrace:
    dp = _Datapath(cfg)
    if cfg.variant == "conventional":
        _run_conventional(dp)
    else:
        _run_modified(dp)
    return dp.trace


def shake_latency(blocks: int, cfg: DatapathConfig | None = None) -> int:
    if blocks < 1:
        raise ValueError("blocks must be >= 1")
    per_block = SHAKE_CYCLES_PER_BLOCK if cfg is None else cfg.shake_cycles_per_block
    return blocks * per_block


def system_latency(trace: CycleTrace, cfg: DatapathConfig) -> int:
    """Sampler cycles plus SHAKE cycles to fill SeedMem once (latencies add)."""
    return trace.total_cycles + shake_latency(cfg.seedmem_depth // RATE_BYTES, cfg)
