"""Benchmark runner: builds Sobolev networks over a grid of settings and writes CSV rows."""
from __future__ import annotations

import csv
import io
import itertools
import json
import os
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .metrics import mc_l2_error
from .net import evaluate_batch
from .relu import relu_eval_batch
from .sobolev import make_target, build_sobolev_net

COLUMNS = ("backend", "d", "r", "eps", "seed", "depth", "neurons", "atoms", "degree",
           "l2_error", "l2_stderr", "certified_bound", "runtime_ms", "error")
BACKENDS = ("multiplicative", "relu")


def parse_profile(text: str) -> tuple[str, dict]:
    """Parse ``name:key=val,key=val``. Values are read as JSON when possible (so lists like [0.5,0.5] work)."""
    name, _, rest = text.partition(":")
    name = name.strip()
    if not name:
        raise ValueError(f"profile {text!r} has no name")
    params, depth, start, parts = {}, 0, 0, []
    for i, ch in enumerate(rest):
        if ch in "[(":
            depth += 1
        elif ch in "])":
            depth -= 1
        elif ch == "," and depth == 0:
            parts.append(rest[start:i])
            start = i + 1
    parts.append(rest[start:])
    for part in parts:
        if not part.strip():
            continue
        key, eq, val = part.partition("=")
        if not eq or not key.strip():
            raise ValueError(f"profile parameter {part!r} is not key=value")
        try:
            params[key.strip()] = json.loads(val)
        except json.JSONDecodeError:
            params[key.strip()] = val.strip()
    return name, params


@dataclass(frozen=True)
class Cell:
    index: int
    backend: str
    profile: str
    params: dict
    d: int
    r: int
    eps: float
    seed: int
    certificates: bool
    n_samples: int
    measure_seed: int


@dataclass
class BenchConfig:
    """Parsed benchmark document.

    Shape::

        {"seed": 0, "n_samples": 4000,
         "experiments": [{"target": {"profile": "indicator", "d": 2, "r": [1, 2], "certificates": true},
                          "eps": [0.5, 0.25], "seed": [0, 1], "backend": ["multiplicative"]}]}

    Each of backend, eps, d, r and seed may be a scalar or a list; cells
    are the Cartesian product in that order, experiments in file order.
    """

    seed: int = 0
    n_samples: int = 4000
    experiments: list = field(default_factory=list)

    @classmethod
    def from_document(cls, doc) -> "BenchConfig":
        if not isinstance(doc, dict):
            raise ValueError("benchmark config must be an object")
        experiments = doc.get("experiments", [])
        if not isinstance(experiments, list):
            raise ValueError("'experiments' must be a list")
        cfg = cls(int(doc.get("seed", 0)), int(doc.get("n_samples", 4000)), experiments)
        cfg.cells()  # validate eagerly
        return cfg

    def cells(self) -> list[Cell]:
        out = []
        for k, exp in enumerate(self.experiments):
            where = f"experiments[{k}]"
            if not isinstance(exp, dict) or not isinstance(exp.get("target"), dict):
                raise ValueError(f"{where} needs a 'target' object")
            tgt = exp["target"]
            prof = tgt.get("profile", "indicator")
            if isinstance(prof, dict):
                name, params = prof.get("name"), dict(prof.get("params", {}))
            else:
                name, params = parse_profile(str(prof))
            for b in _listify(exp.get("backend", "multiplicative")):
                if b not in BACKENDS:
                    raise ValueError(f"{where}: unknown backend {b!r}")
            if "eps" not in exp:
                raise ValueError(f"{where} needs 'eps'")
            grid = itertools.product(_listify(exp.get("backend", "multiplicative")), _listify(exp["eps"]),
                                     _listify(tgt.get("d", 2)), _listify(tgt.get("r", 1)),
                                     _listify(exp.get("seed", 0)))
            for backend, eps, d, r, seed in grid:
                idx = len(out)
                mseed = int(np.random.SeedSequence([self.seed, idx]).generate_state(1)[0])
                out.append(Cell(idx, backend, name, params, int(d), int(r), float(eps), int(seed),
                                bool(tgt.get("certificates", True)), self.n_samples, mseed))
        return out


def _listify(v):
    return list(v) if isinstance(v, (list, tuple)) else [v]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def run_cell(cell: Cell) -> dict:
    start = time.perf_counter()
    row = dict.fromkeys(COLUMNS)
    row.update(backend=cell.backend, d=cell.d, r=cell.r, eps=cell.eps, seed=cell.seed)
    try:
        target = make_target(cell.profile, **{**cell.params, "d": cell.d, "r": cell.r})
        target.certificates = (target.certificates[0] and cell.certificates,
                               target.certificates[1] and cell.certificates)
        net, rep = build_sobolev_net(target, cell.eps, cell.seed, backend=cell.backend)
        run = relu_eval_batch if cell.backend == "relu" else evaluate_batch
        est = mc_l2_error(lambda X: run(net, X), target.reference(rep.M), cell.d, cell.n_samples, cell.measure_seed)
        row.update(depth=rep.depth, neurons=rep.neurons, atoms=rep.n_atoms, degree=rep.degree,
                   l2_error=est.value, l2_stderr=est.std_error, certified_bound=rep.certified_bound)
    except (ValueError, ArithmeticError, MemoryError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    row["runtime_ms"] = round((time.perf_counter() - start) * 1000, 3)
    return row


def worker_count() -> int:
    env = os.environ.get("MNA_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValueError(f"MNA_THREADS must be an integer, got {env!r}") from None
        if n < 1:
            raise ValueError("MNA_THREADS must be at least 1")
        return n
    return os.cpu_count() or 1


def run_benchmark(config: BenchConfig | dict, workers: int | None = None) -> list[dict]:
    """Run every cell; rows come back in config order whatever the completion order."""
    if isinstance(config, dict):
        config = BenchConfig.from_document(config)
    cells = config.cells()
    workers = worker_count() if workers is None else workers
    # Certificate warnings are per cell noise here; the filter is set once, outside the workers.
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        if workers <= 1 or len(cells) <= 1:
            return [run_cell(c) for c in cells]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run_cell, cells))


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row.get(c)) for c in COLUMNS])
    return buf.getvalue()


def strip_runtime(csv_text: str) -> str:
    """CSV with the runtime_ms column removed, for determinism comparisons."""
    rows = list(csv.reader(io.StringIO(csv_text)))
    if not rows:
        return ""
    drop = rows[0].index("runtime_ms")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for r in rows:
        writer.writerow(r[:drop] + r[drop + 1:])
    return buf.getvalue()
