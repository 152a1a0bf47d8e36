"""End-to-end search for Eulerian lattices with a given f-vector, with a resumable run directory.

Run directory layout::

    manifest.json    configuration, per-graph status, totals, digest
    graphs.txt       graph6 codes to process, one per line
    graphs.jsonl     append-only per-graph results
    lattices.jsonl   final classification records, sorted by lattice code
    certificates/    non-polytopality certificates, one JSON file per lattice
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence

from .chirotope import SeedError, certify, seed_is_nondegenerate
from .facets import collect_ridges, enumerate_facet_candidates
from .feasibility import BudgetExceeded, TriviallyInfeasible, build_instance, enumerate_solutions
from .fvector import FVector, screen
from .graphs import enumerate_graphs, from_graph6, to_graph6
from .lattice import FaceLattice, LatticeError, assemble
from .topology import betti_numbers, bistellar_reduce, triangulate

log = logging.getLogger(__name__)

WORKERS_ENV = "SPHERECENSUS_WORKERS"

DEFAULT_CONFIG = {
    "workers": None,
    "budget_nodes": None,
    "edge_lb": 3,
    "min_degree": 4,
    # 4-connectivity holds for skeleta of 3-manifolds; 2 reproduces the relaxed search
    "connectivity": 4,
    "flip_budget": 100_000,
    "cert_bases": 40,
    "allowlist": None,
}


class BundleError(ValueError):
    """A facet-list file could not be read."""


class InconsistentFVector(ValueError):
    """The declared f-vector disagrees with the face counts."""


@dataclass
class ClassificationRecord:
    code: str
    f_vector: list[int]
    facets: list[list[int]]
    eulerian: bool
    interval_connected: bool
    intersection: bool
    lattice: bool
    betti: list[int] | None = None
    torsion: list[int] | None = None
    bistellar: str | None = None
    flips: int | None = None
    sphere: bool = False
    polytopality: str = "undecided"  # polytopal | non-polytopal | undecided | not-sphere
    certificate: dict | None = None
    certificate_ref: str | None = None
    certificate_on_dual: bool = False
    two_simple_two_simplicial: bool = False
    self_dual: bool = False
    hasse: dict | None = None

    def to_json(self) -> dict:
        d = asdict(self)
        d.pop("certificate")
        return d

    def consistent(self) -> bool:
        if self.certificate_ref or self.certificate:
            if not self.sphere:
                return False
        if self.polytopality == "non-polytopal" and not (self.certificate or self.certificate_ref):
            return False
        return True


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def load_config(path: str | Path | None) -> dict:
    cfg = dict(DEFAULT_CONFIG)
    if path:
        with open(path) as fh:
            user = json.load(fh)
        unknown = set(user) - set(cfg)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(user)
    return cfg


# -- classification ------------------------------------------------------------


def _is_simplex_boundary(L: FaceLattice) -> bool:
    return tuple(L.f_vector()) == (5, 10, 10, 5) and all(len(F) == 4 for F in L.faces(3))


def find_certificate(L: FaceLattice, max_bases: int = 40):
    """Try seed bases on L and then on its dual; nondegenerate seeds first.

    A base whose facet has more than five vertices is only accepted when the
    degenerate branch is refuted too. Returns (certificate, on_dual) or (None, False).
    """
    for target, on_dual in ((L, False), (L.dual(), True)):
        bases = []
        ridges = target.faces(2)
        for F in target.faces(3):
            for b in combinations(sorted(F), 4):
                if any(frozenset(b) <= R for R in ridges):
                    continue
                bases.append((not seed_is_nondegenerate(target, b), b))
        bases.sort()
        for degenerate_risk, b in bases[:max_bases]:
            try:
                res = certify(target, b, case_split=degenerate_risk)
            except SeedError:
                continue
            if res.certificate is None:
                continue
            if degenerate_risk and (res.degenerate is None or res.degenerate.certificate is None):
                continue
            cert = res.certificate.to_json()
            if degenerate_risk:
                cert["degenerate_branch"] = res.degenerate.certificate.to_json()
            cert["on_dual"] = on_dual
            return cert, on_dual
    return None, False


def classify(L: FaceLattice, flip_budget: int = 100_000, cert_bases: int = 40) -> ClassificationRecord:
    rec = ClassificationRecord(
        code=L.code(),
        f_vector=list(L.f_vector()),
        facets=L.facet_list(),
        eulerian=L.is_eulerian(),
        interval_connected=L.is_interval_connected(),
        intersection=L.has_intersection_property(),
        lattice=L.is_lattice(),
    )
    if not rec.intersection:
        rec.hasse = L.to_json()
    rec.two_simple_two_simplicial = L.is_2s2s()
    if rec.eulerian and rec.lattice:
        rec.self_dual = L.dual().code() == rec.code
        K = triangulate(L)
        b = betti_numbers(K)
        rec.betti, rec.torsion = list(b.betti), list(b.torsion)
        flips = bistellar_reduce(K, budget=flip_budget)
        rec.bistellar, rec.flips = flips.outcome, len(flips.flips)
        rec.sphere = flips.success and b.is_sphere_like()
        if not b.is_sphere_like():
            rec.polytopality = "not-sphere"
    if not rec.sphere:
        return rec
    if _is_simplex_boundary(L):
        rec.polytopality = "polytopal"
        return rec
    cert, on_dual = find_certificate(L, cert_bases)
    if cert is not None:
        rec.certificate = cert
        rec.certificate_on_dual = on_dual
        rec.polytopality = "non-polytopal"
    return rec


# -- bundles --------------------------------------------------------------------


def load_bundle(path: str | Path) -> tuple[FaceLattice, dict]:
    try:
        with open(path) as fh:
            data = json.load(fh)
        facets = data["facets"]
        if not facets or not all(isinstance(F, list) and all(isinstance(v, int) for v in F) for F in facets):
            raise BundleError("facets must be a nonempty list of integer lists")
        L = FaceLattice.from_facets(facets)
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise BundleError(f"{path}: {exc}") from exc
    except LatticeError as exc:
        raise BundleError(f"{path}: {exc}") from exc
    declared = data.get("f")
    if declared is not None and list(declared) != list(L.f_vector()):
        raise InconsistentFVector(f"declared f = {tuple(declared)}, counted {tuple(L.f_vector())}")
    return L, data


def verify_bundle(path: str | Path, flip_budget: int = 100_000, cert_bases: int = 40) -> ClassificationRecord:
    L, _ = load_bundle(path)
    return classify(L, flip_budget, cert_bases)


# -- per-graph work ----------------------------------------------------------------


def process_graph(code: str, f: Sequence[int], edge_lb: int = 3, budget_nodes: int | None = None) -> dict:
    """Solve one graph; returns a JSON-ready result with the distinct lattices it yields."""
    t0 = time.perf_counter()
    g = from_graph6(code)
    facets = enumerate_facet_candidates(g)
    ridges = collect_ridges(facets)
    out = {"graph": code, "status": "done", "solutions": 0, "lattices": []}
    try:
        inst = build_instance(g, facets, ridges, f, edge_lb=edge_lb)
    except TriviallyInfeasible:
        out["seconds"] = round(time.perf_counter() - t0, 3)
        return out
    seen = {}
    try:
        for sol in enumerate_solutions(inst, max_nodes=budget_nodes):
            out["solutions"] += 1
            try:
                L = assemble(g, facets, sol.facets, ridges, sol.ridges)
            except LatticeError:
                continue
            if tuple(L.f_vector()) != tuple(f):
                continue
            if not (L.is_eulerian() and L.is_interval_connected() and L.is_lattice()):
                continue
            c = L.code()
            if c not in seen:
                seen[c] = L.to_json()
    except BudgetExceeded:
        out["status"] = "partial"
    out["lattices"] = [{"code": c, "lattice": seen[c]} for c in sorted(seen)]
    out["seconds"] = round(time.perf_counter() - t0, 3)
    return out


def _process_chunk(args) -> list[dict]:
    codes, f, edge_lb, budget = args
    return [process_graph(c, f, edge_lb, budget) for c in codes]


# -- runs ---------------------------------------------------------------------------


@dataclass
class RunResult:
    f: FVector
    records: list[ClassificationRecord] = field(default_factory=list)
    partial: list[str] = field(default_factory=list)
    graphs: int = 0
    skipped: bool = False
    out: Path | None = None

    @property
    def complete(self) -> bool:
        return not self.partial and not self.skipped


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest() if path.exists() else ""


class RunDirectory:
    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.manifest_path = self.path / "manifest.json"
        self.graphs_txt = self.path / "graphs.txt"
        self.results = self.path / "graphs.jsonl"
        self.lattices = self.path / "lattices.jsonl"
        self.certs = self.path / "certificates"

    def load_manifest(self) -> dict | None:
        if not self.manifest_path.exists():
            return None
        return json.loads(self.manifest_path.read_text())

    def write_manifest(self, manifest: dict) -> None:
        tmp = self.manifest_path.with_suffix(".tmp")
        tmp.write_text(json.dumps(manifest, indent=1, sort_keys=True))
        tmp.replace(self.manifest_path)

    def done_results(self) -> dict[str, dict]:
        """Completed per-graph results; a torn last line from an interrupted run is ignored."""
        out = {}
        if self.results.exists():
            for line in self.results.read_text().splitlines():
                try:
                    r = json.loads(line)
                except json.JSONDecodeError:
                    continue
                out[r["graph"]] = r
        return out


def find_lattices(
    f: Sequence[int],
    out: str | Path | None = None,
    workers: int | None = None,
    budget_nodes: int | None = None,
    edge_lb: int = 3,
    config: dict | None = None,
    graphs: Iterable[str] | None = None,
) -> RunResult:
    """Enumerate, solve, assemble, deduplicate and classify.

    With ``out`` set, progress is persisted and a rerun resumes where it stopped.
    ``graphs`` overrides graph enumeration (a list of graph6 codes), mainly for tests.
    """
    cfg = dict(DEFAULT_CONFIG)
    cfg.update(config or {})
    if workers is not None:
        cfg["workers"] = workers
    if budget_nodes is not None:
        cfg["budget_nodes"] = budget_nodes
    cfg["edge_lb"] = edge_lb if edge_lb is not None else cfg["edge_lb"]
    nworkers = cfg["workers"] or default_workers()
    f = FVector(*f)
    rep = screen(f)
    if not rep.passed:
        raise ValueError(f"{f} fails the screen: {', '.join(rep.violated)}")

    run = RunDirectory(out) if out is not None else None
    result = RunResult(f, out=run.path if run else None)

    if cfg.get("allowlist"):
        known = {tuple(v) for v in json.loads(Path(cfg["allowlist"]).read_text())}
        if tuple(f) in known:
            result.skipped = True
            if run:
                run.path.mkdir(parents=True, exist_ok=True)
                run.write_manifest({"f": list(f), "config": cfg, "status": "skipped-known-polytope"})
            return result

    # graph list
    codes: list[str]
    if run and run.graphs_txt.exists():
        codes = run.graphs_txt.read_text().split()
    elif graphs is not None:
        codes = sorted(graphs)
    else:
        codes = [to_graph6(g) for g in enumerate_graphs(f.f0, f.f1, cfg["min_degree"], cfg["connectivity"])]
    if run:
        run.path.mkdir(parents=True, exist_ok=True)
        if not run.graphs_txt.exists():
            run.graphs_txt.write_text("".join(c + "\n" for c in codes))
    result.graphs = len(codes)

    done = run.done_results() if run else {}
    status = {c: done[c]["status"] if c in done else "pending" for c in codes}
    manifest = {"f": list(f), "config": cfg, "graphs_total": len(codes), "status": "running", "graph_status": status}
    if run:
        run.write_manifest(manifest)

    todo = [c for c in codes if c not in done]
    log.info("%d graphs, %d already done", len(codes), len(codes) - len(todo))
    sink = run.results.open("a") if run else None
    try:
        for r in _run_jobs(todo, f, cfg, nworkers):
            done[r["graph"]] = r
            status[r["graph"]] = r["status"]
            if sink:
                sink.write(json.dumps(r, sort_keys=True) + "\n")
                sink.flush()
                if len(done) % 500 == 0:
                    run.write_manifest(manifest)
    finally:
        if sink:
            sink.close()

    # merge: single owner, order independent
    lattices: dict[str, dict] = {}
    for c in codes:
        for item in done[c]["lattices"]:
            lattices.setdefault(item["code"], item["lattice"])
    result.partial = sorted(c for c in codes if done[c]["status"] == "partial")
    for code in sorted(lattices):
        L = FaceLattice.from_json(lattices[code])
        rec = classify(L, cfg["flip_budget"], cfg["cert_bases"])
        if rec.f_vector != list(f):
            raise AssertionError(f"f-vector changed at emission for {code}")
        result.records.append(rec)

    if run:
        run.certs.mkdir(exist_ok=True)
        with run.lattices.open("w") as fh:
            for i, rec in enumerate(result.records):
                if rec.certificate is not None:
                    name = f"certificates/lattice_{i}.json"
                    (run.path / name).write_text(json.dumps(rec.certificate, indent=1))
                    rec.certificate_ref = name
                fh.write(json.dumps(rec.to_json(), sort_keys=True) + "\n")
        manifest["status"] = "partial" if result.partial else "complete"
        manifest["partial_graphs"] = result.partial
        manifest["lattices"] = len(result.records)
        manifest["digest"] = _digest(run.lattices)
        run.write_manifest(manifest)
    return result


def _run_jobs(todo: list[str], f, cfg, nworkers: int):
    args = (tuple(f), cfg["edge_lb"], cfg["budget_nodes"])
    if nworkers <= 1 or len(todo) < 2:
        for c in todo:
            yield process_graph(c, *args)
        return
    chunk = max(1, min(50, len(todo) // (nworkers * 8) or 1))
    batches = [(todo[i : i + chunk], *args) for i in range(0, len(todo), chunk)]
    with ProcessPoolExecutor(max_workers=nworkers) as pool:
        for rs in pool.map(_process_chunk, batches):
            yield from rs


# -- reporting ---------------------------------------------------------------------


def report(path: str | Path) -> dict:
    run = RunDirectory(path)
    manifest = run.load_manifest()
    if manifest is None:
        raise FileNotFoundError(f"no manifest in {path}")
    recs = []
    if run.lattices.exists():
        recs = [json.loads(line) for line in run.lattices.read_text().splitlines() if line]
    return {
        "f": tuple(manifest["f"]),
        "status": manifest.get("status"),
        "graphs": manifest.get("graphs_total", 0),
        "lattices": len(recs),
        "spheres": sum(r["sphere"] for r in recs),
        "np": sum(r["polytopality"] == "non-polytopal" for r in recs),
        "undecided": sum(r["polytopality"] == "undecided" for r in recs),
        "partial_graphs": len(manifest.get("partial_graphs", [])),
    }
