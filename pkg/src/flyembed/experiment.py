"""Experiment grids: expansion, seeded execution and CSV reports.

Grid order (outermost first): source, preprocess, distribution, density,
k, sparsifier, scenario; realizations innermost. In sequential mode the
``k`` level is replaced by sparsifier, variant (``seq`` then ``direct``)
and prefix ``i``.

Matrix seeds are a 64-bit BLAKE2b hash of ``(master_seed, dataset,
distribution, density, D)``; realization ``r`` uses ``seed + r``. Runs that
differ only in preprocessing, sparsifier or scenario therefore see the same
matrices, and adding values to any grid axis leaves existing seeds alone.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .core import DenseDataset, stable_hash64
from .errors import FlyEmbedError, InvalidSpec, SchemaViolation
from .evaluation import EvalSpec, map_from_neighbors, sample_queries
from .ingest import SourceSpec, load_source
from .preprocess import KINDS as PREPROCESS_KINDS
from .preprocess import PreprocessSpec, apply_preprocess
from .projection import ProjectionSpec, project_batch, sample_matrix
from .similarity import Measure, top_k_neighbors
from .sparsifier import KINDS as SPARSIFIER_KINDS
from .sparsifier import matching_blocks, sparsify_batch, storage_bits_block, storage_bits_kwta

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "dataset", "preprocess", "distribution", "density", "sparsifier", "k", "D",
    "k_prime", "k_prime_saturated", "scenario", "realization", "seed", "map",
    "bits_kwta", "bits_block", "wall_ms", "error",
)
TIMING_COLUMNS = ("wall_ms",)
SCENARIOS = {"euc_euc": Measure.EUCLIDEAN, "ang_ang": Measure.ANGULAR}
WORKERS_ENV = "FLYEMBED_WORKERS"
AGGREGATE = "mean"
SEED_MOD = 2**64


@dataclass(frozen=True)
class SparsifierEntry:
    kind: str
    matching_bits: bool = False

    @property
    def label(self) -> str:
        return f"{self.kind}+matching_bits" if self.matching_bits else self.kind


@dataclass(frozen=True)
class SequentialSpec:
    k: int
    block_size: int
    prefixes: Optional[tuple] = None

    @property
    def D(self) -> int:
        return self.k * self.block_size

    def prefix_list(self) -> tuple:
        return self.prefixes if self.prefixes is not None else tuple(range(1, self.k + 1))


@dataclass(frozen=True)
class ExperimentSpec:
    sources: tuple
    preprocess: tuple = ("original",)
    r: float = 100.0
    distributions: tuple = ("binomial",)
    densities: tuple = (0.1,)
    D_rule: tuple = ("multiple_of_k", 20)
    sparsifiers: tuple = (SparsifierEntry("kwta_binary"),)
    k: tuple = ()
    scenarios: tuple = ("euc_euc",)
    eval: EvalSpec = EvalSpec()
    sequential: Optional[SequentialSpec] = None
    master_seed: int = 0

    def D_for(self, k: int) -> int:
        rule, value = self.D_rule
        return k * value if rule == "multiple_of_k" else value

    def query_seed(self, dataset: str) -> int:
        if self.eval.query_seed is not None:
            return self.eval.query_seed
        return stable_hash64(self.master_seed, "queries", dataset)

    def matrix_seed(self, dataset: str, distribution: str, density: float, D: int) -> int:
        return stable_hash64(self.master_seed, "matrix", dataset, distribution, float(density), int(D))

    @classmethod
    def from_dict(cls, raw: dict, base_dir: Optional[Path] = None) -> "ExperimentSpec":
        try:
            return _parse_spec(raw, base_dir)
        except InvalidSpec:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidSpec(f"{type(exc).__name__}: {exc}") from exc

    @classmethod
    def from_file(cls, path, overrides: Optional[dict] = None) -> "ExperimentSpec":
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise InvalidSpec(f"{path}: {exc}") from exc
        for key, value in (overrides or {}).items():
            set_dotted(raw, key, value)
        return cls.from_dict(raw, path.parent)


def set_dotted(raw: dict, dotted: str, value) -> None:
    """Assign ``value`` at a dotted path such as ``eval.K`` or ``sources.0.path``."""
    parts = dotted.split(".")
    node = raw
    for part in parts[:-1]:
        if isinstance(node, list):
            node = node[int(part)]
        else:
            node = node.setdefault(part, {})
    last = parts[-1]
    if isinstance(node, list):
        node[int(last)] = value
    else:
        node[last] = value


def _as_tuple(v) -> tuple:
    return tuple(v) if isinstance(v, (list, tuple)) else (v,)


def _parse_spec(raw: dict, base_dir: Optional[Path]) -> ExperimentSpec:
    if not isinstance(raw, dict):
        raise InvalidSpec("experiment spec must be an object")
    known = {"sources", "source", "preprocess", "r", "projection", "sparsifiers",
             "k", "scenarios", "eval", "sequential", "master_seed"}
    unknown = set(raw) - known
    if unknown:
        raise InvalidSpec(f"unknown keys: {sorted(unknown)}")

    src_raw = raw.get("sources", raw.get("source"))
    if src_raw is None:
        raise InvalidSpec("no source given")
    sources = []
    for s in _as_tuple(src_raw):
        s = dict(s)
        if base_dir is not None and not Path(s["path"]).is_absolute():
            s["path"] = str(base_dir / s["path"])
        sources.append(SourceSpec(**s))
    labels = [s.label for s in sources]
    if len(set(labels)) != len(labels):
        raise InvalidSpec("source names must be unique")

    preprocess = _as_tuple(raw.get("preprocess", "original"))
    for p in preprocess:
        if p not in PREPROCESS_KINDS:
            raise InvalidSpec(f"unknown preprocessing {p!r}")
    r = float(raw.get("r", 100.0))
    if not r > 0:
        raise InvalidSpec("r must be positive")

    proj = raw.get("projection", {})
    distributions = _as_tuple(proj.get("distribution", "binomial"))
    densities = tuple(float(p) for p in _as_tuple(proj.get("density", 0.1)))
    for dist in distributions:
        if dist not in ("binomial", "hypergeo_rows", "hypergeo_cols"):
            raise InvalidSpec(f"unknown distribution {dist!r}")
    if any(not 0 < p <= 1 for p in densities):
        raise InvalidSpec("densities must lie in (0, 1]")
    d_rule_raw = proj.get("D_rule", {"multiple_of_k": 20})
    if not isinstance(d_rule_raw, dict) or len(d_rule_raw) != 1:
        raise InvalidSpec("D_rule must be {\"multiple_of_k\": n} or {\"fixed\": D}")
    (rule, value), = d_rule_raw.items()
    if rule not in ("multiple_of_k", "fixed") or int(value) < 1:
        raise InvalidSpec(f"bad D_rule {d_rule_raw}")

    sparsifiers = []
    for s in _as_tuple(raw.get("sparsifiers", "kwta_binary")):
        entry = SparsifierEntry(s) if isinstance(s, str) else SparsifierEntry(s["kind"], bool(s.get("matching_bits", False)))
        if entry.kind not in SPARSIFIER_KINDS + ("identity",):
            raise InvalidSpec(f"unknown sparsifier {entry.kind!r}")
        if entry.matching_bits and entry.kind != "block_binary":
            raise InvalidSpec("matching_bits applies only to block_binary")
        sparsifiers.append(entry)
    if not sparsifiers:
        raise InvalidSpec("sparsifier list is empty")

    scenarios = _as_tuple(raw.get("scenarios", "euc_euc"))
    if not scenarios or any(s not in SCENARIOS for s in scenarios):
        raise InvalidSpec(f"scenarios must be drawn from {sorted(SCENARIOS)}")

    ev = dict(raw.get("eval", {}))
    eval_spec = EvalSpec(K=int(ev.pop("K", 200)), num_queries=int(ev.pop("num_queries", 1000)),
                         num_realizations=int(ev.pop("num_realizations", 10)),
                         query_seed=ev.pop("query_seed", None))
    if ev:
        raise InvalidSpec(f"unknown eval keys: {sorted(ev)}")

    sequential = None
    if raw.get("sequential"):
        sq = raw["sequential"]
        prefixes = tuple(int(i) for i in sq["prefixes"]) if sq.get("prefixes") is not None else None
        sequential = SequentialSpec(int(sq["k"]), int(sq["block_size"]), prefixes)
        if sequential.k < 1 or sequential.block_size < 1:
            raise InvalidSpec("sequential k and block_size must be positive")
        if any(not 1 <= i <= sequential.k for i in sequential.prefix_list()):
            raise InvalidSpec("sequential prefixes must lie in [1, k]")
        if any(s.kind not in ("kwta_binary", "block_binary") or s.matching_bits for s in sparsifiers):
            raise InvalidSpec("sequential mode supports kwta_binary and block_binary only")

    ks = tuple(int(k) for k in _as_tuple(raw.get("k", ()))) if raw.get("k") is not None else ()
    if sequential is None and not ks:
        raise InvalidSpec("k list is empty")
    if any(k < 1 for k in ks):
        raise InvalidSpec("every k must be at least 1")

    return ExperimentSpec(
        sources=tuple(sources), preprocess=preprocess, r=r, distributions=distributions,
        densities=densities, D_rule=(rule, int(value)), sparsifiers=tuple(sparsifiers), k=ks,
        scenarios=scenarios, eval=eval_spec, sequential=sequential,
        master_seed=int(raw.get("master_seed", 0)) % SEED_MOD,
    )


# ---------------------------------------------------------------------------
# Grid expansion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    """One cell of the grid; realizations are looped inside it."""

    index: int
    dataset: str
    preprocess: str
    distribution: str
    density: float
    sparsifier: str
    kind: str
    matching_bits: bool
    k: int
    D: int
    scenario: str
    seed: int
    variant: str = "standard"  # standard | seq | direct | identity

    def fingerprint(self) -> dict:
        return {k: getattr(self, k) for k in
                ("dataset", "preprocess", "distribution", "density", "sparsifier", "k", "D",
                 "scenario", "seed", "variant")}


def expand_grid(spec: ExperimentSpec, dataset_dims: Optional[dict] = None) -> list[RunConfig]:
    """Cartesian product of the grid axes in the documented order.

    ``dataset_dims`` maps source labels to ``d`` and is only needed for the
    identity sparsifier, whose embedding dimension is the input dimension.
    """
    if spec.sequential is None and not spec.k:
        raise InvalidSpec("k list is empty")
    runs: list[RunConfig] = []

    def add(**kw):
        runs.append(RunConfig(index=len(runs), **kw))

    for src in spec.sources:
        ds = src.label
        for pre in spec.preprocess:
            if any(s.kind == "identity" for s in spec.sparsifiers):
                d = (dataset_dims or {}).get(ds, 0)
                for sc in spec.scenarios:
                    add(dataset=ds, preprocess=pre, distribution="none", density=0.0,
                        sparsifier="identity", kind="identity", matching_bits=False, k=0, D=d,
                        scenario=sc, seed=0, variant="identity")
            projected = [s for s in spec.sparsifiers if s.kind != "identity"]
            for dist in spec.distributions:
                for p in spec.densities:
                    if spec.sequential is not None:
                        sq = spec.sequential
                        seed = spec.matrix_seed(ds, dist, p, sq.D)
                        for s in projected:
                            for variant in ("seq", "direct"):
                                for i in sq.prefix_list():
                                    for sc in spec.scenarios:
                                        add(dataset=ds, preprocess=pre, distribution=dist, density=p,
                                            sparsifier=f"{s.kind}/{variant}", kind=s.kind,
                                            matching_bits=False, k=i, D=i * sq.block_size,
                                            scenario=sc, seed=seed, variant=variant)
                        continue
                    for k in spec.k:
                        D = spec.D_for(k)
                        seed = spec.matrix_seed(ds, dist, p, D)
                        for s in projected:
                            for sc in spec.scenarios:
                                add(dataset=ds, preprocess=pre, distribution=dist, density=p,
                                    sparsifier=s.label, kind=s.kind, matching_bits=s.matching_bits,
                                    k=k, D=D, scenario=sc, seed=seed)
    return runs


# ---------------------------------------------------------------------------
# Execution
# ---------------------------------------------------------------------------


@dataclass
class RunSummary:
    path: Optional[Path]
    rows: int
    runs: int
    failed_rows: int
    text: str = field(repr=False, default="")

    @property
    def exit_code(self) -> int:
        return 2 if self.failed_rows else 0


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _cost_columns(run: RunConfig) -> dict:
    if run.variant == "identity" or not 1 <= run.k <= run.D:
        return {"k_prime": None, "k_prime_saturated": None, "bits_kwta": None, "bits_block": None}
    kp, sat = matching_blocks(run.k, run.D)
    blocks = kp if run.matching_bits else run.k
    return {"k_prime": kp, "k_prime_saturated": sat,
            "bits_kwta": storage_bits_kwta(run.k, run.D),
            "bits_block": storage_bits_block(blocks, run.D)}


def _error_text(exc: BaseException) -> str:
    return f"{type(exc).__name__}: {exc}".replace("\n", " ")


class _Executor:
    def __init__(self, spec: ExperimentSpec, datasets: dict):
        self.spec = spec
        self.datasets = datasets
        self._pre: dict = {}
        self._truth: dict = {}
        self._lock = threading.Lock()

    def preprocessed(self, ds: str, pre: str) -> DenseDataset:
        key = (ds, pre)
        with self._lock:
            if key in self._pre:
                return self._pre[key]
        try:
            value = apply_preprocess(self.datasets[ds], PreprocessSpec(pre, self.spec.r))
        except FlyEmbedError as exc:
            value = exc
        with self._lock:
            self._pre[key] = value
        return value

    def truth(self, ds: str, pre: str, measure: Measure, r: int, X_pre: DenseDataset):
        key = (ds, pre, measure, r)
        with self._lock:
            if key in self._truth:
                return self._truth[key]
        qids = self.query_ids(ds, r, X_pre.count)
        value = (qids, top_k_neighbors(X_pre.vectors, qids, measure, self.spec.eval.K))
        with self._lock:
            self._truth[key] = value
        return value

    def query_ids(self, ds: str, r: int, N: int) -> np.ndarray:
        return sample_queries(N, self.spec.eval.num_queries, self.spec.query_seed(ds), r)

    def run_group(self, group: list[RunConfig]) -> dict:
        """Evaluate every run of one projection group for all realizations."""
        results = {}
        first = group[0]
        R = self.spec.eval.num_realizations
        X_pre = self.preprocessed(first.dataset, first.preprocess)
        if isinstance(X_pre, Exception):
            for run in group:
                for r in range(R):
                    results[(run.index, r)] = (None, 0.0, _error_text(X_pre))
            return results
        try:
            self.spec.eval.check(X_pre.count)
        except (FlyEmbedError, ValueError) as exc:
            for run in group:
                for r in range(R):
                    results[(run.index, r)] = (None, 0.0, _error_text(exc))
            return results

        for r in range(R):
            Y, proj_error = None, None
            if first.variant != "identity":
                full_D = first.D if first.variant == "standard" else self.spec.sequential.D
                seed = (first.seed + r) % SEED_MOD
                try:
                    pspec = ProjectionSpec(full_D, first.density, first.distribution, seed)
                    Y = project_batch(sample_matrix(pspec, X_pre.dims), X_pre)
                except (FlyEmbedError, ValueError) as exc:
                    proj_error = _error_text(exc)
            full_codes: dict = {}
            for run in group:
                start = time.perf_counter()
                if proj_error is not None:
                    results[(run.index, r)] = (None, 0.0, proj_error)
                    continue
                try:
                    E = self._embed(run, X_pre, Y, full_codes)
                    measure = SCENARIOS[run.scenario]
                    qids, truth = self.truth(run.dataset, run.preprocess, measure, r, X_pre)
                    predicted = top_k_neighbors(E, qids, measure, self.spec.eval.K)
                    value = map_from_neighbors(truth, predicted)
                    results[(run.index, r)] = (value, time.perf_counter() - start, "")
                except (FlyEmbedError, ValueError) as exc:
                    results[(run.index, r)] = (None, time.perf_counter() - start, _error_text(exc))
        return results

    def _embed(self, run: RunConfig, X_pre: DenseDataset, Y, full_codes: dict) -> np.ndarray:
        if run.variant == "identity":
            return X_pre.vectors
        if run.variant == "standard":
            blocks = matching_blocks(run.k, run.D).k_prime if run.matching_bits else run.k
            return sparsify_batch(Y, run.kind, blocks)
        sq = self.spec.sequential
        if run.variant == "seq":
            if run.kind not in full_codes:
                full_codes[run.kind] = sparsify_batch(Y, run.kind, sq.k)
            return full_codes[run.kind][:, :run.D]
        return sparsify_batch(Y[:, :run.D], run.kind, run.k)


def _group_runs(runs: list[RunConfig]) -> list[list[RunConfig]]:
    groups: dict = {}
    for run in runs:
        key = (run.dataset, run.preprocess, run.distribution, run.density, run.seed, run.variant == "identity")
        groups.setdefault(key, []).append(run)
    return list(groups.values())


def _worker_count() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def run_experiment(spec: ExperimentSpec, out_path=None) -> RunSummary:
    """Execute the grid and write the CSV report.

    Dataset loading failures propagate (spec/IO failure). Every other error
    is recorded in the ``error`` column of the affected rows.
    """
    datasets = {src.label: load_source(src) for src in spec.sources}
    runs = expand_grid(spec, {k: v.dims for k, v in datasets.items()})
    executor = _Executor(spec, datasets)
    groups = _group_runs(runs)
    results: dict = {}
    workers = _worker_count()
    log.info("running %d runs in %d projection groups with %d worker(s)", len(runs), len(groups), workers)
    if workers == 1:
        for g in groups:
            results.update(executor.run_group(g))
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(executor.run_group, groups):
                results.update(part)

    R = spec.eval.num_realizations
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    failed = 0
    for run in runs:
        base = {"dataset": run.dataset, "preprocess": run.preprocess, "distribution": run.distribution,
                "density": run.density, "sparsifier": run.sparsifier, "k": run.k, "D": run.D,
                "scenario": run.scenario, **_cost_columns(run)}
        values, total_ms, errors = [], 0.0, 0
        for r in range(R):
            value, secs, err = results[(run.index, r)]
            total_ms += secs * 1000.0
            if err:
                errors += 1
            else:
                values.append(value)
            seed = "" if run.variant == "identity" else (run.seed + r) % SEED_MOD
            writer.writerow([_fmt(x) for x in _ordered(base, realization=r, seed=seed, map=value,
                                                       wall_ms=round(secs * 1000.0, 3), error=err)])
        agg_err = f"{errors} of {R} realizations failed" if errors else ""
        agg_map = None if errors else float(np.mean(values))
        writer.writerow([_fmt(x) for x in _ordered(base, realization=AGGREGATE,
                                                   seed="" if run.variant == "identity" else run.seed,
                                                   map=agg_map, wall_ms=round(total_ms, 3), error=agg_err)])
        failed += errors
    text = buf.getvalue()
    path = None
    if out_path is not None:
        path = Path(out_path)
        path.write_text(text)
    return RunSummary(path, len(runs) * (R + 1), len(runs), failed, text)


def _ordered(base: dict, **extra) -> list:
    row = {**base, **extra}
    return [row[c] for c in CSV_COLUMNS]


# ---------------------------------------------------------------------------
# Report verification
# ---------------------------------------------------------------------------


@dataclass
class VerifySummary:
    rows: int
    runs: int
    error_rows: int


def csv_body(path_or_text, drop=TIMING_COLUMNS) -> str:
    """The report with timing columns removed, for byte-level comparisons."""
    text = path_or_text if "\n" in str(path_or_text) else Path(path_or_text).read_text()
    rows = list(csv.reader(io.StringIO(text)))
    keep = [i for i, name in enumerate(rows[0]) if name not in drop]
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    for row in rows:
        w.writerow([row[i] for i in keep])
    return out.getvalue()


def verify_report(csv_path) -> VerifySummary:
    """Check a report: exact header, MAP in [0, 1], realization order, seeds, aggregates and bit costs."""
    try:
        with open(csv_path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise SchemaViolation(f"cannot read {csv_path}: {exc}") from exc
    if not rows or tuple(rows[0]) != CSV_COLUMNS:
        missing = set(CSV_COLUMNS) - set(rows[0] if rows else [])
        raise SchemaViolation(f"header mismatch; missing columns: {sorted(missing)}" if missing
                              else "header columns out of order or extra columns present")
    col = {name: i for i, name in enumerate(CSV_COLUMNS)}
    key_cols = [c for c in CSV_COLUMNS if c not in ("realization", "seed", "map", "wall_ms", "error")]
    runs: dict = {}
    error_rows = 0
    for line_no, row in enumerate(rows[1:], start=2):
        if len(row) != len(CSV_COLUMNS):
            raise SchemaViolation(f"line {line_no}: {len(row)} fields, expected {len(CSV_COLUMNS)}")
        err, raw_map = row[col["error"]], row[col["map"]]
        value = None
        if raw_map:
            try:
                value = float(raw_map)
            except ValueError:
                raise SchemaViolation(f"line {line_no}: map {raw_map!r} is not a number") from None
            if not 0.0 <= value <= 1.0:
                raise SchemaViolation(f"line {line_no}: map {value} outside [0, 1]")
        elif not err:
            raise SchemaViolation(f"line {line_no}: empty map without an error")
        if err:
            error_rows += 1
        _check_bits(row, col, line_no)

        key = tuple(row[col[c]] for c in key_cols)
        state = runs.setdefault(key, {"last": -1, "offset": None, "values": [], "closed": False, "errors": 0})
        if state["closed"]:
            raise SchemaViolation(f"line {line_no}: realization row after the aggregate row")
        real, seed = row[col["realization"]], row[col["seed"]]
        if real == AGGREGATE:
            state["closed"] = True
            if seed and state["offset"] is not None and int(seed) != state["offset"]:
                raise SchemaViolation(f"line {line_no}: aggregate seed does not match realization seeds")
            if value is not None and state["values"]:
                if state["errors"] or abs(value - float(np.mean(state["values"]))) > 1e-12:
                    raise SchemaViolation(f"line {line_no}: aggregate map disagrees with realizations")
            continue
        try:
            r = int(real)
        except ValueError:
            raise SchemaViolation(f"line {line_no}: bad realization {real!r}") from None
        if r < state["last"]:
            raise SchemaViolation(f"line {line_no}: realization indices decrease")
        state["last"] = r
        if seed:
            offset = (int(seed) - r) % SEED_MOD
            if state["offset"] is None:
                state["offset"] = offset
            elif offset != state["offset"]:
                raise SchemaViolation(f"line {line_no}: seed is not base seed + realization")
        if value is not None:
            state["values"].append(value)
        if err:
            state["errors"] += 1
    return VerifySummary(rows=len(rows) - 1, runs=len(runs), error_rows=error_rows)


def _check_bits(row, col, line_no) -> None:
    k, D = row[col["k"]], row[col["D"]]
    bits = row[col["bits_kwta"]]
    if not bits:
        return
    try:
        k, D, bits = int(k), int(D), float(bits)
    except ValueError:
        raise SchemaViolation(f"line {line_no}: non-numeric k, D or bits") from None
    if not 1 <= k <= D or abs(bits - k * math.log2(D)) > 1e-9 * max(1.0, bits):
        raise SchemaViolation(f"line {line_no}: bits_kwta inconsistent with k and D")


def default_spec_dict() -> dict:
    """A small example spec, also printed by ``flyembed formats``."""
    return {
        "sources": [{"format": "idx_images", "path": "train-images-idx3-ubyte",
                     "subset_size": 10000, "subset_rule": "first_n", "name": "mnist"}],
        "preprocess": ["original", "center_normalize"],
        "r": 100,
        "projection": {"distribution": ["binomial"], "density": [0.1], "D_rule": {"multiple_of_k": 20}},
        "sparsifiers": ["kwta_binary", {"kind": "block_binary", "matching_bits": True}],
        "k": [16, 32, 64],
        "scenarios": ["euc_euc", "ang_ang"],
        "eval": {"K": 200, "num_queries": 1000, "num_realizations": 10, "query_seed": 0},
        "sequential": None,
        "master_seed": 0,
    }
