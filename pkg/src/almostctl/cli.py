"""``almostctl`` command line.

Exit status: 0 when every check passes, 1 when some check fails, 2 for
parse or usage errors, 3 when a horizon or size limit is exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import arrows as ar
from . import complexes as cx
from . import localization as loc
from .corpus import ENV_VAR, corpus_dir, load_corpus
from .errors import AlmostError, HorizonError, ParseError, UsageError
from .ground import FieldSpec, RingSpec
from .objfile import parse_objects
from .poly import Poly
from .quillen import SizeError
from .report import render
from .runtime import limits
from .suites import BUILDERS, Config, run_suite

MAX_HORIZON = 16
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("configuration")
    g.add_argument("--ring", choices=("domain", "truncated"), default="domain")
    g.add_argument("--field", default="fp:5", help="fp:<p> or q")
    g.add_argument("--horizon", type=int, default=8)
    g.add_argument("--corpus", default=None, help=f"corpus directory (default ${ENV_VAR} "
                                                  "or the shipped corpus)")
    g.add_argument("--jobs", type=_positive, default=1)
    g.add_argument("--seed", type=_seed, default=0)
    g.add_argument("--report", choices=("json", "text"), default="text")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    p = argparse.ArgumentParser(prog="almostctl",
                                description="Verify idempotent-ideal localizations over "
                                            "k[x^(1/2^oo)].")
    sub = p.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("suite", parents=[common], help="run a verification suite")
    s.add_argument("name", choices=sorted(BUILDERS) + ["all"])
    s.add_argument("--max-n", type=_positive, default=200,
                   help="largest n for the Z/n idempotent-ideal count")
    s.add_argument("--timings", action="store_true", help="include per-check durations")

    a = sub.add_parser("arrow", parents=[common], help="apply an arrow-category operation")
    a.add_argument("op", choices=("cok", "ker", "boxprod", "diagprod"))
    a.add_argument("file", help="object file defining the arrows")
    a.add_argument("arrows", nargs="+", help="arrow name(s); boxprod and diagprod take two")

    c = sub.add_parser("classify", parents=[common],
                       help="almost-zero / firm / closed classification of file objects")
    c.add_argument("file")
    return p


def make_config(ns) -> Config:
    if ns.horizon < 0:
        raise UsageError("horizon must be non-negative")
    if ns.horizon > MAX_HORIZON:
        raise HorizonError(f"horizon {ns.horizon} exceeds the supported maximum {MAX_HORIZON}")
    ring = RingSpec(ns.ring, FieldSpec.parse(ns.field))
    return Config(ring=ring, horizon=ns.horizon, corpus=ns.corpus, jobs=ns.jobs, seed=ns.seed,
                  report=ns.report, max_n=getattr(ns, "max_n", 200),
                  timings=getattr(ns, "timings", False))


def _homology(C, n: int) -> dict:
    """Invariant factors per degree; "0" stands for a free summand."""
    field = C.field
    return {str(k): [str(Poly.from_terms(field, list(enumerate(key)))) for key in inv]
            for k, inv in cx.homology_invariants(C, n).items()}


def _dump(obj: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(obj, indent=2, sort_keys=True) + "\n"
    lines = []

    def walk(d, pad):
        for k in sorted(d):
            v = d[k]
            if isinstance(v, dict):
                lines.append(f"{pad}{k}:")
                walk(v, pad + "  ")
            else:
                lines.append(f"{pad}{k}: {v}")
    walk(obj, "")
    return "\n".join(lines) + "\n"


def _load_with_corpus(path: str, cfg: Config):
    """Parse ``path`` on top of the corpus so it may refer to corpus objects."""
    from pathlib import Path
    cdir = corpus_dir(cfg.corpus).resolve()
    p = Path(path)
    if not p.exists():
        raise ParseError("no such file or directory", path)
    table = load_corpus(cfg.ring, cfg.corpus)
    if p.resolve().parent == cdir or p.resolve() == cdir:
        return table, {e.name for e in table.entries.values() if Path(e.path).resolve() == p.resolve()
                       or p.resolve() == cdir}
    before = set(table.entries)
    parse_objects(p, cfg.ring, table)
    return table, set(table.entries) - before


def cmd_suite(ns, cfg: Config) -> int:
    table = load_corpus(cfg.ring, cfg.corpus)
    rep = run_suite(ns.name, cfg, table)
    sys.stdout.write(render(rep, cfg.report))
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_arrow(ns, cfg: Config) -> int:
    table, _ = _load_with_corpus(ns.file, cfg)
    arrows = table.arrows
    want = 1 if ns.op in ("cok", "ker") else 2
    if len(ns.arrows) != want:
        raise UsageError(f"arrow {ns.op} takes {want} arrow name(s)")
    objs = []
    for name in ns.arrows:
        if name not in arrows:
            raise UsageError(f"no arrow named {name!r} in {ns.file}")
        objs.append(ar.arrow(arrows[name], name))
    if ns.op == "cok":
        out = ar.cok_functor(objs[0])
    elif ns.op == "ker":
        out = ar.ker_functor(objs[0])
    elif ns.op == "boxprod":
        out = ar.pushout_product(*objs)
    else:
        out = ar.diag_tensor(*objs)
    N = cfg.horizon
    with limits(N):
        v = cx.chain_map_verdict(out.f, N)
        doc = {"operation": ns.op, "arrow": out.name, "level": N,
               "source": {"name": out.source.name, "homology": _homology(out.source, N)},
               "target": {"name": out.target.name, "homology": _homology(out.target, N)},
               "chain_map": v.to_dict()}
    sys.stdout.write(_dump(doc, cfg.report))
    return EXIT_OK if v.passed else EXIT_FAIL


def cmd_classify(ns, cfg: Config) -> int:
    table, own = _load_with_corpus(ns.file, cfg)
    objs = [(n, o) for n, o in list(table.systems.items()) + list(table.complexes.items())
            if n in own]
    rows = {}
    ok = True
    with limits(cfg.horizon):
        for name, obj in objs:
            rep = loc.classify(obj, cfg.horizon)
            rows[name] = rep.to_dict()
            ok = ok and rep.consistency.passed
    if cfg.report == "json":
        sys.stdout.write(json.dumps({"horizon": cfg.horizon, "ring": str(cfg.ring),
                                     "objects": rows}, indent=2, sort_keys=True) + "\n")
    else:
        width = max([len(n) for n in rows] + [6])
        head = (f"{'object'.ljust(width)}  {'almost-zero':<22}  {'firm':<22}  "
                f"{'closed (pro-zero)':<22}")
        lines = [head, "-" * len(head)]
        for name in sorted(rows):
            r = rows[name]
            cells = [_label(r[k]) for k in ("almost_zero", "firm", "closed")]
            lines.append(f"{name.ljust(width)}  " + "  ".join(f"{c:<22}" for c in cells).rstrip())
        sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_FAIL


def _label(d: dict) -> str:
    s = d["status"]
    return f"{s}({d['horizon']})" if s == "pass-up-to-horizon" else s


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = make_config(ns)
        return {"suite": cmd_suite, "arrow": cmd_arrow, "classify": cmd_classify}[ns.verb](ns, cfg)
    except ParseError as exc:
        print(f"almostctl: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (HorizonError, SizeError) as exc:
        print(f"almostctl: limit exceeded: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (UsageError, AlmostError) as exc:
        print(f"almostctl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
