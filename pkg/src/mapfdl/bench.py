"""Success-rate benchmark over random grid instances.

Config files are flat ``key = value`` text (``#`` comments), e.g.::

    width = 20
    height = 20
    block_probability = 0.2
    agents = 2,4,6,8          # or a range: 10..100:10
    instances = 25
    distance_min = 22
    distance_max = 24
    deadline = 24
    time_limit = 60
    seed = 0

Instance ``k`` of agent count ``a`` is generated from
``SeedSequence([seed, a, k, attempt])``; ``attempt`` only advances when
start/goal placement fails.  "Solved" means proven optimal within the time
limit, model construction included.
"""
from __future__ import annotations

import csv
import io
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

from .extract import solve_instance
from .generator import PlacementError, generate_random_instance
from .instance import validate_plan
from .solver import STATUS_OPTIMAL, SolverConfig

SUMMARY_COLUMNS = ("agents", "instances", "solved", "success_rate", "mean_time", "median_time", "mean_m_succ")
INSTANCE_COLUMNS = ("agents", "instance", "seed", "status", "m_succ", "time")
TIMING_COLUMNS = ("mean_time", "median_time", "time")


class BenchmarkAbort(RuntimeError):
    pass


@dataclass(frozen=True)
class BenchConfig:
    width: int = 20
    height: int = 20
    block_probability: float = 0.2
    agents: tuple[int, ...] = (2, 4, 6, 8)
    instances: int = 25
    distance_min: int = 22
    distance_max: int = 24
    deadline: int = 24
    time_limit: float = 60.0
    seed: int = 0
    reduction: bool = True
    per_commodity: bool = True
    formulation: str = "abstracted"
    workers: int = 1


def _parse_agents(text: str) -> tuple[int, ...]:
    text = text.strip()
    if ".." in text:
        lo, _, rest = text.partition("..")
        hi, _, step = rest.partition(":")
        return tuple(range(int(lo), int(hi) + 1, int(step or 1)))
    return tuple(int(a) for a in text.split(",") if a.strip())


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("on", "true", "yes", "1"):
        return True
    if t in ("off", "false", "no", "0"):
        return False
    raise ValueError(f"expected on/off, got {text!r}")


def parse_config(text: str, **overrides) -> BenchConfig:
    types = {f.name: f.type for f in fields(BenchConfig)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in types:
            raise ValueError(f"config line {lineno}: unknown or malformed entry {raw.strip()!r}")
        value = value.strip()
        try:
            if key == "agents":
                values[key] = _parse_agents(value)
            elif key in ("reduction", "per_commodity"):
                values[key] = _parse_bool(value)
            elif key == "formulation":
                values[key] = value
            elif key in ("block_probability", "time_limit"):
                values[key] = float(value)
            else:
                values[key] = int(value)
        except ValueError as exc:
            raise ValueError(f"config line {lineno}: {exc}") from None
    values.update({k: v for k, v in overrides.items() if v is not None})
    return BenchConfig(**values)


def instance_seed(seed: int, agents: int, index: int, attempt: int = 0) -> int:
    return int(np.random.SeedSequence([seed, agents, index, attempt]).generate_state(1, dtype=np.uint64)[0])


@dataclass
class InstanceResult:
    agents: int
    instance: int
    seed: int
    status: str
    m_succ: int
    time: float


@dataclass
class BenchResult:
    config: BenchConfig
    rows: list[InstanceResult] = field(default_factory=list)

    def summary(self) -> list[dict]:
        out = []
        for a in self.config.agents:
            rs = [r for r in self.rows if r.agents == a]
            solved = sum(r.status == STATUS_OPTIMAL for r in rs)
            times = [r.time for r in rs]
            out.append({
                "agents": a,
                "instances": len(rs),
                "solved": solved,
                "success_rate": round(100.0 * solved / len(rs), 1) if rs else 100.0,
                "mean_time": round(statistics.fmean(times), 4) if times else 0.0,
                "median_time": round(statistics.median(times), 4) if times else 0.0,
                "mean_m_succ": round(statistics.fmean([r.m_succ for r in rs]), 3) if rs else 0.0,
            })
        return out

    def summary_csv(self) -> str:
        return _csv(SUMMARY_COLUMNS, self.summary())

    def instances_csv(self) -> str:
        rows = [{**r.__dict__, "time": round(r.time, 4)} for r in self.rows]
        return _csv(INSTANCE_COLUMNS, rows)

    def table(self) -> str:
        summ = self.summary()
        head = ["agents"] + [str(s["agents"]) for s in summ]
        rate = ["success rate"] + [f"{s['success_rate']:g}%" for s in summ]
        mean = ["mean time (s)"] + [f"{s['mean_time']:g}" for s in summ]
        med = ["median time (s)"] + [f"{s['median_time']:g}" for s in summ]
        widths = [max(len(r[k]) for r in (head, rate, mean, med)) for k in range(len(head))]
        return "\n".join(" | ".join(c.rjust(w) for c, w in zip(r, widths)) for r in (head, rate, mean, med)) + "\n"


def _csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({c: r[c] for c in columns})
    return buf.getvalue()


def make_instance(config: BenchConfig, agents: int, index: int):
    for attempt in range(10):
        seed = instance_seed(config.seed, agents, index, attempt)
        try:
            inst = generate_random_instance(
                config.width, config.height, config.block_probability, agents,
                (config.distance_min, config.distance_max), config.deadline, seed,
            )
            return seed, inst
        except PlacementError:
            continue
    raise BenchmarkAbort(f"could not place {agents} agents for instance {index}")


def run_one(config: BenchConfig, agents: int, index: int) -> InstanceResult:
    seed, inst = make_instance(config, agents, index)
    rep = solve_instance(
        inst,
        SolverConfig(time_limit=config.time_limit),
        use_reduction=config.reduction,
        use_per_commodity=config.per_commodity,
        formulation=config.formulation,
    )
    problems = validate_plan(inst, rep.plan)
    if problems:
        raise BenchmarkAbort(f"agents={agents} instance={index}: plan fails verification: {problems[:3]}")
    return InstanceResult(agents, index, seed, rep.status, rep.m_succ, rep.timings["total"])


def _run_star(args):
    return run_one(*args)


def run_benchmark(config: BenchConfig, progress=None) -> BenchResult:
    jobs = [(config, a, k) for a in config.agents for k in range(config.instances)]
    result = BenchResult(config)
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(_run_star, jobs))
    else:
        rows = []
        for job in jobs:
            rows.append(run_one(*job))
            if progress is not None:
                progress(rows[-1])
    result.rows = sorted(rows, key=lambda r: (config.agents.index(r.agents), r.instance))
    return result
