"""Command line interface: ``spherecensus <command> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from importlib import resources
from pathlib import Path

from . import pipeline
from .chirotope import Certificate, SeedError, certify, check_certificate, seed_is_nondegenerate
from .diagram import DegenerateCell, check_diagram
from .facets import collect_ridges, enumerate_facet_candidates
from .feasibility import TriviallyInfeasible, build_instance, enumerate_solutions
from .fvector import FVector, candidate_stream, fatness, screen, size
from .graphs import enumerate_graphs, from_graph6, to_graph6
from .lattice import FaceLattice, LatticeError, assemble
from .topology import betti_numbers, bistellar_reduce, triangulate


def _resolve(path: str) -> Path:
    """Paths starting with ``data:`` refer to the bundled example files."""
    if path.startswith("data:"):
        name = path[5:]
        if not name.endswith(".json"):
            name += ".json"
        return Path(str(resources.files("spherecensus") / "data" / name))
    return Path(path)


def _fvec(text: str) -> FVector:
    try:
        parts = [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad f-vector {text!r}") from None
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("an f-vector has four entries")
    return FVector(*parts)


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x.strip().lstrip("v")) for x in text.split(","))


def _facet_index(text: str) -> int:
    return int(text.lstrip("Ff"))


def _load(path: str) -> tuple[FaceLattice, dict]:
    return pipeline.load_bundle(_resolve(path))


def cmd_filter(a) -> int:
    if a.entries:
        if a.f is not None or len(a.entries) != 4:
            raise ValueError("give the f-vector either as four numbers or with --f")
        a.f = FVector(*a.entries)
    if a.f is None:
        raise ValueError("no f-vector given")
    rep = screen(a.f)
    print(f"{a.f}: size {size(a.f)}, fatness {fatness(a.f) if size(a.f) else 'undefined'}")
    print("passed" if rep.passed else "violates " + ", ".join(rep.violated))
    return 0 if rep.passed else 1


def cmd_candidates(a) -> int:
    for v in candidate_stream(a.max_size):
        print(v)
    return 0


def cmd_graphs(a) -> int:
    count = 0
    k = 4 if a.require_4_connected else a.connectivity
    for g in enumerate_graphs(a.n, a.m, a.min_degree, k):
        count += 1
        if not a.count:
            print(to_graph6(g))
    if a.count:
        print(count)
    return 0


def cmd_facets(a) -> int:
    code = a.graph_opt or a.graph
    if not code:
        raise ValueError("no graph given")
    g = from_graph6(code)
    facets = enumerate_facet_candidates(g)
    for F in facets:
        print(" ".join(map(str, F.vertices)), "|", " ".join("-".join(map(str, c)) for c in F.faces))
    print(f"{len(facets)} facet candidates, {len(collect_ridges(facets))} ridge candidates", file=sys.stderr)
    return 0


def cmd_solve(a) -> int:
    code = a.graph_opt or a.graph
    if not code:
        raise ValueError("no graph given")
    g = from_graph6(code)
    facets = enumerate_facet_candidates(g)
    ridges = collect_ridges(facets)
    try:
        inst = build_instance(g, facets, ridges, a.f, edge_lb=a.edge_lb)
    except TriviallyInfeasible as exc:
        print(f"infeasible: {exc}")
        return 1
    n = 0
    for sol in enumerate_solutions(inst, mode=a.mode, max_nodes=a.budget_nodes):
        n += 1
        try:
            L = assemble(g, facets, sol.facets, ridges, sol.ridges)
            flags = f"eulerian={L.is_eulerian()} interval-connected={L.is_interval_connected()}"
        except LatticeError as exc:
            flags = f"not a poset: {exc}"
        print(json.dumps([list(facets[i].vertices) for i in sorted(sol.facets)]), flags)
    print(f"{n} solutions", file=sys.stderr)
    return 0 if n else 1


def cmd_verify_lattice(a) -> int:
    L, _ = _load(a.file)
    checks = {
        "f-vector": str(L.f_vector()),
        "eulerian": L.is_eulerian(),
        "interval-connected": L.is_interval_connected(),
        "intersection-property": L.has_intersection_property(),
        "2s2s": L.is_2s2s(),
        "code": L.code(),
    }
    for k, v in checks.items():
        print(f"{k}: {v}")
    ok = checks["eulerian"] and checks["interval-connected"] and checks["intersection-property"]
    return 0 if ok else 1


def cmd_verify_sphere(a) -> int:
    L, _ = _load(a.file)
    K = triangulate(L)
    b = betti_numbers(K)
    t = time.perf_counter()
    res = bistellar_reduce(K, budget=a.budget, seed=a.seed)
    print(f"triangulation: {len(K.facets)} tetrahedra, chi = {K.euler_characteristic()}")
    print(f"betti: {b}")
    print(f"bistellar: {res.outcome} after {len(res.flips)} flips ({time.perf_counter() - t:.2f}s)")
    if a.flips_out:
        Path(a.flips_out).write_text(json.dumps(res.flips))
    return 0 if res.success and b.is_sphere_like() else 1


def cmd_certify(a) -> int:
    L, _ = _load(a.file)
    target = (a.sigma, a.quad) if a.sigma and a.quad else None
    try:
        res = certify(L, a.base, case_split=a.case_split, target=target)
    except SeedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    chi = res.chirotope
    print(f"seed {list(a.base)}: {chi.known()} of the 5-subsets determined")
    if not seed_is_nondegenerate(L, a.base):
        print("note: the seed facet has more than five vertices; use --case-split to cover the coplanar branch")
    cert = res.certificate
    if cert is None:
        print("no contradiction found")
    else:
        print(f"violated relation: sigma={list(cert.sigma)} quad={list(cert.quad)} products={cert.products}")
        print(f"certificate: {len(cert.steps)} steps, {len(cert.violations)} violated relations at fixpoint")
        if a.out:
            Path(a.out).write_text(json.dumps(cert.to_json(), indent=1))
    if res.degenerate is not None:
        d = res.degenerate.certificate
        print("degenerate branch:", "refuted" if d else "no contradiction found")
    if a.show:
        for b, v in sorted(chi.values.items()):
            print(",".join(map(str, b)), v)
    return 0 if res.decided else 1


def cmd_verify_certificate(a) -> int:
    L, _ = _load(a.file)
    data = json.loads(Path(a.certificate).read_text())
    if data.get("on_dual"):
        L = L.dual()
    cert = Certificate.from_json(data)
    ok, idx, why = check_certificate(cert, L)
    print("valid" if ok else f"invalid at step {idx}: {why}")
    return 0 if ok else 1


def cmd_verify_diagram(a) -> int:
    L, _ = _load(a.file)
    data = json.loads(_resolve(a.coords).read_text())
    coords = data["coords"] if isinstance(data, dict) else data
    base = _facet_index(a.base_facet) if a.base_facet else data.get("base_facet")
    try:
        rep = check_diagram(L, base, coords)
    except DegenerateCell as exc:
        print(f"degenerate: {exc}")
        return 1
    print(f"base volume {rep.base_volume}, cells {rep.cell_volume}")
    for msg in rep.failures:
        print("  " + msg)
    print("diagram verified" if rep.ok else "not a diagram")
    return 0 if rep.ok else 1


def _print_row(row: dict) -> None:
    cols = ["f", "graphs", "lattices", "spheres", "np", "undecided", "status"]
    print("  ".join(f"{c:>12}" for c in cols))
    print("  ".join(f"{','.join(map(str, row[c])) if c == 'f' else str(row[c]):>12}" for c in cols))


def cmd_find_lattices(a) -> int:
    cfg = pipeline.load_config(a.config)
    if a.allowlist:
        cfg["allowlist"] = a.allowlist
    if a.connectivity is not None:
        cfg["connectivity"] = a.connectivity
    edge_lb = a.edge_lb if a.edge_lb is not None else cfg["edge_lb"]
    res = pipeline.find_lattices(
        a.f, out=a.out, workers=a.workers, budget_nodes=a.budget_nodes, edge_lb=edge_lb, config=cfg
    )
    if res.skipped:
        print(f"{a.f}: on the allowlist of realized f-vectors, skipped")
        return 0
    for rec in res.records:
        print(json.dumps({k: rec.to_json()[k] for k in ("code", "sphere", "polytopality", "self_dual")}))
    if a.out:
        _print_row(pipeline.report(a.out))
    else:
        print(f"{len(res.records)} lattices from {res.graphs} graphs")
    if res.partial:
        print(f"partial: {len(res.partial)} graphs exceeded the node budget")
    return 0


def cmd_verify(a) -> int:
    rec = pipeline.verify_bundle(_resolve(a.file))
    out = rec.to_json()
    out["certificate"] = "present" if rec.certificate else None
    print(json.dumps(out, indent=1))
    return 0 if rec.eulerian and rec.interval_connected and rec.consistent() else 1


def cmd_report(a) -> int:
    _print_row(pipeline.report(a.dir))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spherecensus", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("filter", help="screen an f-vector")
    s.add_argument("entries", nargs="*", type=int, help="f0 f1 f2 f3")
    s.add_argument("--f", type=_fvec)
    s.set_defaults(func=cmd_filter)

    s = sub.add_parser("candidates", help="list screened f-vectors up to a size")
    s.add_argument("--max-size", type=int, required=True)
    s.set_defaults(func=cmd_candidates)

    s = sub.add_parser("graphs", help="enumerate graphs up to isomorphism (graph6 output)")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--min-degree", type=int, default=4)
    s.add_argument("--connectivity", type=int, default=2)
    s.add_argument("--require-4-connected", action="store_true")
    s.add_argument("--count", action="store_true")
    s.set_defaults(func=cmd_graphs)

    s = sub.add_parser("facets", help="facet candidates of a graph")
    s.add_argument("graph", nargs="?", help="graph6 code")
    s.add_argument("--graph", dest="graph_opt")
    s.set_defaults(func=cmd_facets)

    s = sub.add_parser("solve", help="solve the facet/ridge selection problem for one graph")
    s.add_argument("graph", nargs="?")
    s.add_argument("--graph", dest="graph_opt")
    s.add_argument("--f", type=_fvec, required=True)
    s.add_argument("--edge-lb", type=int, choices=(1, 3), default=3)
    s.add_argument("--mode", choices=("backtrack", "blocking"), default="backtrack")
    s.add_argument("--budget-nodes", type=int)
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("verify-lattice", help="lattice predicates of a facet list")
    s.add_argument("file")
    s.set_defaults(func=cmd_verify_lattice)

    s = sub.add_parser("verify-sphere", help="homology and bistellar reduction")
    s.add_argument("file")
    s.add_argument("--budget", type=int, default=100_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--flips-out")
    s.set_defaults(func=cmd_verify_sphere)

    s = sub.add_parser("certify", help="search for a non-polytopality certificate")
    s.add_argument("file")
    s.add_argument("--base", type=_ints, required=True)
    s.add_argument("--case-split", action="store_true")
    s.add_argument("--sigma", type=_ints)
    s.add_argument("--quad", type=_ints)
    s.add_argument("--out")
    s.add_argument("--show", action="store_true", help="print every determined sign")
    s.set_defaults(func=cmd_certify)

    s = sub.add_parser("verify-certificate", help="replay a certificate")
    s.add_argument("file")
    s.add_argument("certificate")
    s.set_defaults(func=cmd_verify_certificate)

    s = sub.add_parser("verify-diagram", help="exact diagram check")
    s.add_argument("file")
    s.add_argument("--base-facet")
    s.add_argument("--coords", required=True)
    s.set_defaults(func=cmd_verify_diagram)

    s = sub.add_parser("find-lattices", help="full search for one f-vector")
    s.add_argument("--f", type=_fvec, required=True)
    s.add_argument("--out")
    s.add_argument("--workers", type=int)
    s.add_argument("--budget-nodes", type=int)
    s.add_argument("--edge-lb", type=int, choices=(1, 3))
    s.add_argument("--connectivity", type=int)
    s.add_argument("--config")
    s.add_argument("--allowlist")
    s.set_defaults(func=cmd_find_lattices)

    s = sub.add_parser("verify", help="all checks on a facet-list file")
    s.add_argument("file")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("report", help="summary row of a run directory")
    s.add_argument("dir")
    s.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (pipeline.BundleError, pipeline.InconsistentFVector, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
