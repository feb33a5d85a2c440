"""Command-line front end.

    f2merit analyze mt19937 --v-max 32
    f2merit merit mt19937 --v 12 --relations
    f2merit birthday memt19937ii --n 20000000 --t 3 --log2d 21 --lags 0,396,623 --reps 5 --seed 1

Reports go to ``--output`` (or ``$F2MERIT_OUTPUT_DIR/<command>-<generator>.<ext>``
when that variable is set, else stdout).  Progress goes to stderr only.
Every report starts with a header holding the toolkit version and the full
run configuration.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys
import time
from pathlib import Path

from . import __version__
from .birthday import BirthdayParams, birthday_spacings
from .generators import MEMT19937II, MT19937, GeneratorSpec, Kind, load_small_dense, make_generator
from .lattice import defect_profile
from .merit import (
    DEFAULT_MAX_ENUM,
    DEFAULT_SAMPLES,
    BudgetExceeded,
    LinearRelation,
    enumerate_min_weight,
    verify_relation,
)

log = logging.getLogger("f2merit")

GENERATORS = {"mt19937": MT19937, "memt19937ii": MEMT19937II, "memt19937-ii": MEMT19937II}
OUTPUT_ENV = "F2MERIT_OUTPUT_DIR"


class CheckFailed(Exception):
    """A verification command found a violated assertion."""


def resolve_generator(name: str) -> GeneratorSpec:
    key = name.lower()
    if key in GENERATORS:
        return GENERATORS[key]
    path = Path(name)
    if path.suffix == ".json" and path.exists():
        return load_small_dense(path)
    raise SystemExit(f"unknown generator {name!r}: use mt19937, memt19937ii or a SmallDense .json config")


# --- rendering ---------------------------------------------------------------


def _header(config: dict) -> dict:
    return {"toolkit": "f2merit", "version": __version__, "config": config}


def render(doc: dict, fmt: str, table: list[list] | None = None) -> str:
    """JSON document, or TSV with '#'-prefixed header lines and a table body."""
    if fmt == "json" or table is None:
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    lines = [f"# {k}: {json.dumps(v, sort_keys=True)}" for k, v in doc["header"].items()]
    lines += ["\t".join(str(c) for c in row) for row in table]
    return "\n".join(lines) + "\n"


def emit(text: str, args, command: str, ext: str):
    target = args.output
    if target is None and os.environ.get(OUTPUT_ENV):
        gen = Path(args.generator).stem.lower() if getattr(args, "generator", None) else "run"
        target = Path(os.environ[OUTPUT_ENV]) / f"{command}-{gen}.{ext}"
    if target is None or str(target) == "-":
        sys.stdout.write(text)
        return None
    target = Path(target)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text)
    log.info("wrote %s", target)
    return target


def _config(args) -> dict:
    skip = {"func", "output", "verbose"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# --- commands ----------------------------------------------------------------


def _merit_kwargs(args) -> dict:
    return dict(max_enum=args.max_enum, sample=args.sample, samples=args.samples, workers=args.threads)


def cmd_analyze(args) -> int:
    spec = resolve_generator(args.generator)
    v_max = args.v_max or spec.w
    bases: dict = {}
    prof = defect_profile(spec, v_max, keep_bases=bases)
    merits = {}
    if not args.no_merit:
        for v in range(1, v_max + 1):
            try:
                merits[v] = enumerate_min_weight(bases[v], **_merit_kwargs(args))
            except BudgetExceeded as exc:
                log.error("v=%d: %s; raise --max-enum or drop --no-sample", v, exc)
                return 2
            log.info("v=%d k=%d v'=%d N_v=%d%s", v, prof.k(v), bases[v].v_prime, merits[v].N_v,
                     "" if merits[v].exact else " (sampled)")
    columns = []
    for v, k, d in prof.rows:
        col = {"v": v, "minima": prof.minima[v], "k": k, "d": d, "v_prime": bases[v].v_prime}
        if v in merits:
            col["N_v"] = merits[v].N_v
            col["N_v_exact"] = merits[v].exact
        columns.append(col)
    doc = {
        "header": _header(_config(args)),
        "generator": spec.label,
        "p": prof.p,
        "delta": prof.delta,
        "delta_complete": v_max == spec.w,
        "columns": columns,
    }
    table = [[""] + [f"L*_{c['v']}" for c in columns]]
    for i in range(v_max):
        table.append([f"nu_{i + 1}"] + [c["minima"][i] if i < len(c["minima"]) else "" for c in columns])
    table.append(["d(v)"] + [c["d"] for c in columns])
    if merits:
        table.append(["N_v"] + [f"{c['N_v']}" + ("" if c["N_v_exact"] else "*") for c in columns])
    table.append(["Delta", prof.delta])
    emit(render(doc, args.format, table), args, "analyze", "tsv" if args.format == "tsv" else "json")
    return 0


def cmd_merit(args) -> int:
    spec = resolve_generator(args.generator)
    from .merit import reduced_basis_for

    red = reduced_basis_for(spec, args.v)
    try:
        report = enumerate_min_weight(red, **_merit_kwargs(args))
    except BudgetExceeded as exc:
        log.error("%s; pass --max-enum or --sample", exc)
        return 2
    doc = {"header": _header(_config(args)), "generator": spec.label, "merit": report.to_dict()}
    if args.relations:
        doc["relations"] = [r.to_dict() | {"text": r.render()} for r in report.relations]
    table = [["v", "k", "v_prime", "shortest", "N_v", "exact"],
             [report.v, report.k, report.v_prime, report.n_vectors, report.N_v, report.exact]]
    if args.relations:
        table.append([])
        table.append(["weight", "relation"])
        table += [[r.weight, r.render()] for r in report.relations]
    emit(render(doc, args.format, table), args, "merit", "tsv" if args.format == "tsv" else "json")
    if args.relations_file:
        Path(args.relations_file).write_text(
            json.dumps({"header": doc["header"], "relations": [r.to_dict() for r in report.relations]}, indent=2) + "\n"
        )
    return 0


def cmd_relations(args) -> int:
    """All minimal relations (every shortest vector), or only the argmin set."""
    spec = resolve_generator(args.generator)
    from .merit import reduced_basis_for, vector_to_relation, walk_shortest

    red = reduced_basis_for(spec, args.v)
    if (1 << red.v_prime) > args.max_enum:
        log.error("v'=%d: 2^%d relations exceed --max-enum", red.v_prime, red.v_prime)
        return 2
    rels = sorted((vector_to_relation(vec, args.v) for _, vec in walk_shortest(red)),
                  key=lambda r: (r.weight, r.terms))
    if args.max_weight is not None:
        rels = [r for r in rels if r.weight <= args.max_weight]
    doc = {"header": _header(_config(args)), "generator": spec.label, "v": args.v, "k": red.k,
           "relations": [r.to_dict() | {"text": r.render()} for r in rels]}
    table = [["weight", "lags", "relation"]] + [[r.weight, ",".join(map(str, r.lags)), r.render()] for r in rels]
    emit(render(doc, args.format, table), args, "relations", "tsv" if args.format == "tsv" else "json")
    return 0


def cmd_verify(args) -> int:
    spec = resolve_generator(args.generator)
    doc = json.loads(Path(args.relation).read_text())
    rels = [LinearRelation.from_dict(r) for r in doc.get("relations", [doc])]
    rng = random.Random(args.seed)
    results = []
    from .generators import random_state

    states = [random_state(spec, rng) for _ in range(args.seeds)]
    for rel in rels:
        ok = all(verify_relation(st, rel, args.span) for st in states)
        results.append({"relation": rel.render(), "weight": rel.weight, "holds": ok})
    out = {"header": _header(_config(args)), "generator": spec.label, "results": results}
    table = [["holds", "weight", "relation"]] + [[r["holds"], r["weight"], r["relation"]] for r in results]
    emit(render(out, args.format, table), args, "verify", "tsv" if args.format == "tsv" else "json")
    return 0 if all(r["holds"] for r in results) else 1


def cmd_birthday(args) -> int:
    spec = resolve_generator(args.generator)
    lags = tuple(int(x) for x in args.lags.split(","))
    params = BirthdayParams(args.reps, args.n, args.log2d, args.t or len(lags), lags, args.seed)
    if spec.kind is Kind.SMALL_DENSE:
        raise SystemExit("birthday needs a seeded generator (mt19937 or memt19937ii)")
    report = birthday_spacings(spec, params, progress=log.info)
    doc = {"header": _header(_config(args))} | report.to_dict()
    table = [["seed", "Y_r"]] + [[s, y] for s, y in zip(params.seeds(), report.counts)]
    table += [["total", report.total], ["mean", report.mean], ["p_value", report.p_value],
              ["seconds", round(report.seconds, 3)]]
    emit(render(doc, args.format, table), args, "birthday", "tsv" if args.format == "tsv" else "json")
    if args.expect_below is not None and not report.p_value < args.expect_below:
        return 1
    if args.expect_between is not None:
        lo, hi = args.expect_between
        if not lo <= report.p_value <= hi:
            return 1
    return 0


def cmd_oracle_selftest(args) -> int:
    from .oracle import brute_k_v, dual_code_min_weight, random_maximal_spec

    rng = random.Random(args.seed)
    rows, failures = [], 0
    for g in range(args.count):
        p = rng.randint(args.p_min, args.p_max)
        w = rng.randint(1, args.w_max)
        spec = random_maximal_spec(rng, p, w)
        bases: dict = {}
        prof = defect_profile(spec, w, keep_bases=bases)
        bad = []
        for v in range(1, w + 1):
            k_lat = prof.k(v)
            k_bf = brute_k_v(spec, v)
            nv = enumerate_min_weight(bases[v]).N_v
            dmin = dual_code_min_weight(spec, k_lat + 1, v)
            if k_lat != k_bf or nv != dmin:
                bad.append({"v": v, "k_lattice": k_lat, "k_brute": k_bf, "N_v": nv, "dual_min": dmin})
        failures += bool(bad)
        rows.append({"index": g, "p": p, "w": w, "pass": not bad, "disagreements": bad})
        log.info("generator %d (p=%d, w=%d): %s", g, p, w, "pass" if not bad else f"FAIL {bad}")
    doc = {"header": _header(_config(args)), "generators": rows, "failures": failures}
    table = [["index", "p", "w", "result", "disagreements"]]
    table += [[r["index"], r["p"], r["w"], "pass" if r["pass"] else "FAIL", json.dumps(r["disagreements"])] for r in rows]
    emit(render(doc, args.format, table), args, "oracle-selftest", "tsv" if args.format == "tsv" else "json")
    return 0 if failures == 0 else 1


def cmd_speed(args) -> int:
    spec = resolve_generator(args.generator)
    results = {}
    if spec.kind is not Kind.SMALL_DENSE:
        import numpy as np

        from . import _kernels
        from .generators import init_genrand

        kind = 0 if spec.kind is Kind.MT19937 else 1
        block = np.array(init_genrand(args.seed), dtype=np.uint32)
        _kernels.mt_words(kind, block, 10)  # compile outside the timing
        t0 = time.perf_counter()
        _kernels.mt_words(kind, block, args.count)
        dt = time.perf_counter() - t0
        results["compiled"] = {"seconds": dt, "words_per_second": args.count / dt}
    gen = make_generator(spec, seed=args.seed) if spec.kind is not Kind.SMALL_DENSE else make_generator(spec, state=1)
    n_py = min(args.count, args.python_count)
    t0 = time.perf_counter()
    gen.words(n_py)
    dt = time.perf_counter() - t0
    results["python"] = {"words": n_py, "seconds": dt, "words_per_second": n_py / dt}
    doc = {"header": _header(_config(args)), "generator": spec.label, "count": args.count, "results": results}
    table = [["path", "words_per_second"]] + [[k, f"{v['words_per_second']:.4g}"] for k, v in results.items()]
    emit(render(doc, args.format, table), args, "speed", "tsv" if args.format == "tsv" else "json")
    return 0


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="f2merit", description=__doc__.split("\n\n")[0])
    ap.add_argument("--version", action="version", version=f"f2merit {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", help="report path ('-' for stdout)")
    common.add_argument("--format", choices=("tsv", "json"), default="tsv")
    common.add_argument("--threads", type=int, default=1, help="worker cap (1 = single-threaded)")
    common.add_argument("--verbose", "-v", action="store_true")
    # analyze samples past the budget by default; merit refuses unless --sample
    budget = argparse.ArgumentParser(add_help=False)
    budget.add_argument("--max-enum", type=int, default=DEFAULT_MAX_ENUM,
                        help="largest 2^v' walked exhaustively (default 2^28)")
    budget.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)

    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common, budget], help="successive minima, d(v), N_v table")
    p.add_argument("generator")
    p.add_argument("--v-max", type=int)
    p.add_argument("--no-merit", action="store_true", help="skip N_v")
    p.add_argument("--no-sample", dest="sample", action="store_false",
                   help="fail instead of sampling when the budget is exceeded")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("merit", parents=[common, budget], help="N_v and its minimum-weight relations")
    p.add_argument("generator")
    p.add_argument("--v", type=int, required=True)
    p.add_argument("--relations", action="store_true", help="include the argmin relations")
    p.add_argument("--relations-file", help="also write the argmin relations as a relation file")
    p.add_argument("--sample", dest="sample", action="store_true",
                   help="sample (upper bound on N_v) when 2^v' exceeds --max-enum")
    p.set_defaults(func=cmd_merit)

    p = sub.add_parser("relations", parents=[common], help="every minimal relation with v-bit accuracy")
    p.add_argument("generator")
    p.add_argument("--v", type=int, required=True)
    p.add_argument("--max-enum", type=int, default=1 << 16)
    p.add_argument("--max-weight", type=int)
    p.set_defaults(func=cmd_relations)

    p = sub.add_parser("verify", parents=[common], help="check relations on generated output")
    p.add_argument("generator")
    p.add_argument("--relation", required=True, help="relation file (JSON)")
    p.add_argument("--span", type=int, default=10_000)
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--seed", type=int, default=0, help="seed for drawing random states")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("birthday", parents=[common], help="birthday spacings with lags")
    p.add_argument("generator")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--reps", "--N", dest="reps", type=int, default=5)
    p.add_argument("--t", type=int)
    p.add_argument("--log2d", type=int, required=True)
    p.add_argument("--lags", required=True, help="comma-separated, increasing")
    p.add_argument("--seed", type=int, default=1, help="base seed")
    p.add_argument("--expect-below", type=float, help="exit 1 unless p < value")
    p.add_argument("--expect-between", type=float, nargs=2, metavar=("LO", "HI"))
    p.set_defaults(func=cmd_birthday)

    p = sub.add_parser("oracle-selftest", parents=[common], help="lattice vs brute force on random small generators")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--p-min", type=int, default=3)
    p.add_argument("--p-max", type=int, default=16)
    p.add_argument("--w-max", type=int, default=8)
    p.add_argument("--seed", type=int, default=2024)
    p.set_defaults(func=cmd_oracle_selftest)

    p = sub.add_parser("speed", parents=[common], help="generation throughput")
    p.add_argument("generator")
    p.add_argument("--count", type=int, default=10**8)
    p.add_argument("--python-count", type=int, default=10**5)
    p.add_argument("--seed", type=int, default=5489)
    p.set_defaults(func=cmd_speed)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(message)s",
        stream=sys.stderr,
    )
    if getattr(args, "threads", 1) < 1:
        raise SystemExit("--threads must be at least 1")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
