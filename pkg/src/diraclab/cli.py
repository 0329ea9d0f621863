"""The ``diraclab`` command line.

Every subcommand writes its primary artifact to ``--out`` when given and to
stdout otherwise.  Exit codes: 0 on success, 1 when a search or a
verification fails (no matching, rejected absorber, pipeline failure), 2 on
usage errors and malformed inputs.

``--threads`` is accepted for interface stability but runs stay sequential:
trial seeds are derived per index, so parallel scheduling could only
reorder identical work, and sequential execution keeps reports byte-stable.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from math import comb
from pathlib import Path

from .absorbing import (
    RAbsorber,
    assemble_contractible,
    contract_absorber,
    dumps_absorber,
    find_rooted_absorber,
    find_sparse_r_absorber,
    is_k_sparse,
    parse_absorber,
    verify_absorber,
    verify_r_absorber,
)
from .errors import (
    CapacityError,
    FormatError,
    NotFound,
    PlacementFailed,
    ShapeError,
    SizeError,
    SpecError,
    StageFailure,
    TargetInfeasible,
    TemplateMatchingFailed,
)
from .hypercore import Hypergraph, dumps_khg, girth, k_density, read_khg, write_khg
from .lab import read_config, run_experiment, sample_hk, experiment_csv, summary_lines
from .matchpower import (
    Matching,
    dumps_matching,
    find_perfect_matching,
    parse_matching,
    verify_matching,
    write_matching,
)
from .pipeline import PipelineParams, dirac_perfect_matching
from .templates import (
    build_resilient_template,
    compact_template,
    read_template,
    verify_resilient_template,
    write_template,
)
from .thresholds import exact_dirac_threshold, parity_barrier, space_barrier

_USAGE_ERRORS = (FormatError, SizeError, SpecError, ShapeError, CapacityError)
_SEARCH_FAILURES = (
    NotFound,
    PlacementFailed,
    TemplateMatchingFailed,
    StageFailure,
    TargetInfeasible,
)

MDK_COLUMNS = ("n", "k", "d", "m", "ratio", "witness_file", "graphs_enumerated", "seconds")

# Smallest complete 3-graph hosts known to fit the two-interior contractible
# shape at these sparsity levels (interior absorber orders 6, 18, 42).
_CONTRACT_HOST_N = {4: 21, 6: 45, 8: 93}


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="ascii")
    else:
        sys.stdout.write(text)


def _parse_ids(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split())
    except ValueError:
        raise SizeError(f"expected space-separated vertex ids, got {text!r}") from None


def _jcell(value: object):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (tuple, frozenset, set)):
        return sorted(value) if isinstance(value, (set, frozenset)) else list(value)
    return value


def _emit_table(args, name: str, columns, rows) -> None:
    if args.format == "json":
        payload = {
            "name": name,
            "columns": list(columns),
            "rows": [
                {c: _jcell(v) for c, v in zip(columns, row)} for row in rows
            ],
        }
        _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", args.out)
    else:
        from .lab import dumps_table

        _emit(dumps_table(name, columns, rows), args.out)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_gen(args) -> int:
    if args.kind == "random":
        H = sample_hk(args.n, args.k, args.p, args.seed)
    elif args.kind == "complete":
        H = Hypergraph.complete(args.n, args.k)
    elif args.kind == "space":
        H = space_barrier(args.n, args.k, args.d)
    else:
        H = parity_barrier(args.n, args.k, args.d)
    _emit(dumps_khg(H), args.out)
    return 0


def _cmd_pm(args) -> int:
    H = read_khg(args.input)
    res = find_perfect_matching(H, budget=args.budget)
    if res.status == "perfect":
        out = args.out or f"{args.input}.matching"
        _emit(dumps_matching(res.matching), out)
        print(f"perfect matching with {len(res.matching.edges)} edges -> {out}")
        return 0
    print(
        f"no perfect matching: status={res.status} "
        f"uncovered={len(res.uncovered)} nodes={res.nodes_explored}",
        file=sys.stderr,
    )
    return 1


def _cmd_mdk(args) -> int:
    routes = ("pruned", "unpruned") if args.route == "both" else (args.route,)
    witness_file = f"{args.out}.witness.khg" if args.out else ""
    rows = []
    values = set()
    witness = None
    for route in routes:
        tick = time.perf_counter()
        rec = exact_dirac_threshold(args.n, args.k, args.d, route=route)
        seconds = time.perf_counter() - tick
        values.add(rec.m_value)
        witness = rec.extremal_witness
        ratio = Fraction(rec.m_value, comb(args.n - args.d, args.k - args.d))
        rows.append(
            (
                args.n,
                args.k,
                args.d,
                rec.m_value,
                ratio,
                witness_file,
                rec.graphs_enumerated,
                f"{seconds:.3f}",
            )
        )
    if len(values) != 1:
        print(f"route disagreement: m values {sorted(values)}", file=sys.stderr)
        return 1
    if args.out and witness is not None:
        write_khg(witness, witness_file, comment=f"extremal witness for n={args.n} k={args.k} d={args.d}")
    _emit_table(args, "mdk", MDK_COLUMNS, rows)
    return 0


# A corrupted artifact is a verification failure (exit 1), even when the
# corruption already trips the parser; only the context graph and the file
# system stay usage errors.
_ARTIFACT_ERRORS = (FormatError, ShapeError, SpecError, SizeError)


def _check_matching(graph_path: str, matching_path: str, perfect: bool) -> int:
    H = read_khg(graph_path)
    try:
        m = parse_matching(Path(matching_path).read_text(encoding="ascii"))
        ok, why = verify_matching(H, m, require_perfect=perfect)
    except _ARTIFACT_ERRORS as exc:
        ok, why = False, str(exc)
    if ok:
        print(f"ok: {len(m.edges)} edges, {len(m.covered)} vertices covered")
        return 0
    print(f"rejected: {why}", file=sys.stderr)
    return 1


def _check_absorber(absorber_path: str, host_path: str | None, sparsity: int | None) -> int:
    host = read_khg(host_path) if host_path else None
    try:
        A = parse_absorber(Path(absorber_path).read_text(encoding="ascii").strip())
        if isinstance(A, RAbsorber):
            ok, why = verify_r_absorber(A, host)
        else:
            ok, why = verify_absorber(A, host)
        if ok and sparsity is not None and not is_k_sparse(A, sparsity):
            ok, why = False, f"not {sparsity}-sparse"
    except _ARTIFACT_ERRORS as exc:
        ok, why = False, str(exc)
    if ok:
        print(f"ok: order {A.order} on roots {' '.join(map(str, A.roots))}")
        return 0
    print(f"rejected: {why}", file=sys.stderr)
    return 1


def _check_template(template_path: str, mode: str, samples: int, seed: int) -> int:
    try:
        T = read_template(template_path)
        rep = verify_resilient_template(T, mode=mode, samples=samples, seed=seed)
    except _ARTIFACT_ERRORS as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return 1
    if rep.ok:
        print(f"ok: mode={rep.mode} removals_checked={rep.checked}")
        return 0
    bad = " ".join(map(str, rep.violating or ()))
    print(f"rejected: removal [{bad}] leaves no perfect matching", file=sys.stderr)
    return 1


def _cmd_absorber(args) -> int:
    if args.action == "find":
        host = read_khg(args.input)
        forbidden = _parse_ids(args.forbidden) if args.forbidden else ()
        A = find_rooted_absorber(
            host,
            _parse_ids(args.roots),
            args.order_cap if args.order_cap is not None else 2 * host.k,
            forbidden=forbidden,
            budget=args.budget,
            min_order=args.min_order,
        )
        _emit(dumps_absorber(A) + "\n", args.out)
        return 0
    if args.action == "verify":
        return _check_absorber(args.input, args.host, args.sparsity)

    # contract: build the standard two-interior contractible shape on a
    # complete 3-graph and collapse its rooted triples.
    if args.n is None and args.K not in _CONTRACT_HOST_N:
        print(f"no default host size for K={args.K}; pass --n", file=sys.stderr)
        return 2
    n = args.n if args.n is not None else _CONTRACT_HOST_N[args.K]
    host = Hypergraph.complete(n, 3)
    rooted = ((0, 1, 2), (3, 4, 5), (6, 7, 8))
    col1, col2 = (1, 4, 7), (2, 5, 8)
    base = set(range(9))
    sub1 = find_sparse_r_absorber(
        host, col1, args.K, q=args.q, seed=2 * args.seed, forbidden=base - set(col1)
    )
    sub2 = find_sparse_r_absorber(
        host,
        col2,
        args.K,
        q=args.q,
        seed=2 * args.seed + 1,
        forbidden=(base - set(col2)) | (sub1.vertices - set(col1)),
    )
    CA = assemble_contractible((0, 3, 6), rooted, (sub1, sub2), host)
    C = contract_absorber(CA)
    dens = k_density(C.graph)
    print(
        f"contracted: n={C.graph.n} m={len(C.graph.edges)} "
        f"girth={girth(C.graph)} k_density={dens.value}"
    )
    if args.out:
        write_khg(C.graph, args.out, comment=f"contracted absorber K={args.K}")
    return 0


def _cmd_template(args) -> int:
    if args.action == "build":
        if not args.out:
            print("template build needs --out (it writes a .khg plus sidecar)", file=sys.stderr)
            return 2
        if args.mode == "compact":
            T = compact_template(args.r, args.k)
        else:
            T = build_resilient_template(args.r, args.k, seed=args.seed)
        write_template(T, args.out)
        print(f"template: r={T.r} k={T.k} v={T.T.n} edges={len(T.T.edges)}")
        return 0
    return _check_template(args.input, args.mode, args.samples, args.seed)


def _read_params(path: str) -> PipelineParams:
    raw: dict[str, str] = {}
    for line in Path(path).read_text(encoding="ascii").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise FormatError(f"expected 'key = value' in params file, got {line!r}")
        raw[key.strip()] = value.strip()
    return PipelineParams.from_mapping(raw)


def _cmd_pipeline(args) -> int:
    H = read_khg(args.input)
    params = _read_params(args.params) if args.params else PipelineParams()
    report = dirac_perfect_matching(H, args.d, args.gamma, params=params, seed=args.seed)
    _emit(report.to_json(), args.out)
    if report.status == "success" and report.matching is not None and args.out:
        write_matching(Matching.from_edges(report.matching), args.out + ".matching")
    return 0 if report.status == "success" else 1


def _cmd_experiment(args) -> int:
    cfg = read_config(args.config)
    result = run_experiment(args.kind, cfg)
    out = args.out or (cfg.out or None)
    if args.format == "json":
        payload = {
            "name": cfg.name,
            "columns": list(result.columns),
            "rows": [
                {c: _jcell(rec.data.get(c)) for c in result.columns[2:]}
                | {"trial": rec.index, "seed": rec.seed}
                for rec in result.records
            ],
            "summary": {k: _jcell(v) for k, v in result.summary.items()},
        }
        _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", out)
    else:
        _emit(experiment_csv(result), out)
        if out:
            for line in summary_lines(result):
                print(line)
    return 0


def _cmd_verify(args) -> int:
    if args.matching:
        if not args.input:
            print("verify --matching needs --in with the host graph", file=sys.stderr)
            return 2
        return _check_matching(args.input, args.matching, args.perfect)
    if args.absorber:
        return _check_absorber(args.absorber, args.input, args.sparsity)
    return _check_template(args.template, args.mode, args.samples, args.seed)


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="diraclab",
        description="Degree thresholds and perfect matchings in uniform hypergraphs.",
    )
    top.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    top.add_argument("--out", default=None, help="write the primary artifact here instead of stdout")
    top.add_argument("--format", choices=("csv", "json"), default="csv", help="table output encoding")
    top.add_argument("--threads", type=int, default=1, help="accepted for compatibility; execution is sequential")
    top.add_argument("--budget", type=int, default=None, help="search node budget where a search runs")
    sub = top.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a hypergraph as .khg")
    gen.add_argument("kind", choices=("random", "complete", "space", "parity"))
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--k", type=int, required=True)
    gen.add_argument("--d", type=int, default=1, help="degree parameter for the barrier kinds")
    gen.add_argument("--p", type=float, default=0.5, help="edge probability for kind random")
    gen.set_defaults(func=_cmd_gen)

    pm = sub.add_parser("pm", help="exact perfect-matching search on a .khg file")
    pm.add_argument("--in", dest="input", required=True)
    pm.set_defaults(func=_cmd_pm)

    mdk = sub.add_parser("mdk", help="exact Dirac threshold by full enumeration")
    mdk.add_argument("--n", type=int, required=True)
    mdk.add_argument("--k", type=int, required=True)
    mdk.add_argument("--d", type=int, required=True)
    mdk.add_argument("--route", choices=("pruned", "unpruned", "both"), default="both")
    mdk.set_defaults(func=_cmd_mdk)

    ab = sub.add_parser("absorber", help="find, verify, or contract absorbers")
    absub = ab.add_subparsers(dest="action", required=True)
    abf = absub.add_parser("find", help="exact rooted-absorber search")
    abf.add_argument("--in", dest="input", required=True)
    abf.add_argument("--roots", required=True, help="space-separated vertex ids")
    abf.add_argument("--forbidden", default="", help="space-separated vertex ids to avoid")
    abf.add_argument("--order-cap", type=int, default=None)
    abf.add_argument("--min-order", type=int, default=0)
    abv = absub.add_parser("verify", help="check a stored absorber record")
    abv.add_argument("--in", dest="input", required=True)
    abv.add_argument("--host", default=None, help="optional .khg whose edges must contain the absorber")
    abv.add_argument("--sparsity", type=int, default=None, help="also require Berge girth >= this")
    abc = absub.add_parser("contract", help="build and collapse the two-interior shape (k=3)")
    abc.add_argument("--K", type=int, required=True, help="sparsity level for the interior absorbers")
    abc.add_argument("--q", type=int, default=3)
    abc.add_argument("--n", type=int, default=None, help="host size override")
    ab.set_defaults(func=_cmd_absorber)

    tp = sub.add_parser("template", help="build or verify matching templates")
    tpsub = tp.add_subparsers(dest="action", required=True)
    tpb = tpsub.add_parser("build")
    tpb.add_argument("--r", type=int, required=True)
    tpb.add_argument("--k", type=int, required=True)
    tpb.add_argument("--mode", choices=("resilient", "compact"), default="resilient")
    tpv = tpsub.add_parser("verify")
    tpv.add_argument("--in", dest="input", required=True, help="path base written by template build")
    tpv.add_argument("--mode", choices=("auto", "exhaustive", "sampled"), default="auto")
    tpv.add_argument("--samples", type=int, default=500)
    tp.set_defaults(func=_cmd_template)

    pl = sub.add_parser("pipeline", help="end-to-end perfect matching construction")
    plsub = pl.add_subparsers(dest="action", required=True)
    plr = plsub.add_parser("run")
    plr.add_argument("--in", dest="input", required=True)
    plr.add_argument("--d", type=int, required=True)
    plr.add_argument("--gamma", type=float, required=True)
    plr.add_argument("--params", default=None, help="key = value file of pipeline knobs")
    pl.set_defaults(func=_cmd_pipeline)

    ex = sub.add_parser("experiment", help="seeded experiment batches from a config file")
    ex.add_argument("kind", choices=("resilience", "inheritance", "load"))
    ex.add_argument("--config", required=True)
    ex.set_defaults(func=_cmd_experiment)

    ver = sub.add_parser("verify", help="re-check a stored artifact")
    what = ver.add_mutually_exclusive_group(required=True)
    what.add_argument("--matching", default=None, help="matching file; needs --in with its graph")
    what.add_argument("--absorber", default=None, help="absorber record; --in optionally names its host")
    what.add_argument("--template", default=None, help="template path base")
    ver.add_argument("--in", dest="input", default=None, help="context graph (.khg)")
    ver.add_argument("--perfect", action="store_true", help="matchings must also be perfect")
    ver.add_argument("--sparsity", type=int, default=None, help="absorbers must have Berge girth >= this")
    ver.add_argument("--mode", choices=("auto", "exhaustive", "sampled"), default="auto")
    ver.add_argument("--samples", type=int, default=500)
    ver.set_defaults(func=_cmd_verify)

    return top


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.threads < 1:
        print("--threads must be at least 1", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except _SEARCH_FAILURES as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return 1
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
