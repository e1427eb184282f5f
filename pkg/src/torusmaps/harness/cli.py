"""Command line entry point: ``torusmaps <verb> [flags]``."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .. import _rng
from .. import sampler
from ..closure import complete_closure
from ..decomp import assemble, decompose, from_json_obj
from ..unicell import FaceWord, add_root, strip_root
from . import experiments as ex
from . import upsilon, verify


def _write(text: str, out: str | None):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _read_jsonl(path: str):
    fh = sys.stdin if path == "-" else open(path)
    with fh:
        for line in fh:
            line = line.strip()
            if line:
                yield json.loads(line)


def _n_list(args) -> list[int]:
    if args.n_list:
        return [int(x) for x in args.n_list.split(",") if x]
    if args.n is not None:
        return [args.n]
    return []


def _config(args) -> ex.ExperimentConfig:
    cfg = ex.ExperimentConfig()
    if getattr(args, "config", None):
        with open(args.config) as fh:
            cfg = ex.ExperimentConfig.from_text(fh.read())
    ns = _n_list(args)
    if ns:
        cfg.n_list = ns
    for key in ("replicas", "seed", "threads", "mode", "out"):
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, val)
    if getattr(args, "timing", False):
        cfg.timing = True
    return cfg


# ---------------------------------------------------------------- verbs


def _sample_task(args):
    n, seed, i, mode, with_map = args
    rec = sampler.sample_triangulation(n, seed, i, mode=mode)
    obj = rec.to_json_obj(include_map=False)
    if with_map:
        obj["triangulation"] = rec.triangulation.to_json_obj()
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def cmd_sample(args) -> int:
    n = args.n
    if n is None:
        raise SystemExit("sample needs --n")
    tasks = [(n, args.seed, i, args.mode, not args.no_map) for i in range(args.count)]
    lines = ex.pmap(_sample_task, tasks, args.threads)
    _write("".join(x + "\n" for x in lines), args.out)
    return 0


def cmd_enumerate(args) -> int:
    e = sampler.enumerate_all(args.n, n_max=args.n_max)
    objs = []
    for i, (T, tri) in enumerate(zip(e.words, e.triangulations)):
        obj = {"n": args.n, "index": i, "word": T.partner.tolist()}
        if not args.no_map:
            obj["triangulation"] = tri.to_json_obj()
        objs.append(obj)
    _write(ex.jsonl(objs), args.out)
    return 0


def cmd_verify(args) -> int:
    kw: dict = {"seed": args.seed}
    ns = _n_list(args)
    if args.suite in ("closure", "labels", "decomp", "appendix"):
        if ns:
            kw["n_list"] = tuple(ns)
        if args.count is not None:
            kw["count"] = args.count
    elif args.suite == "sampler-uniformity":
        if args.n is not None:
            kw["n"] = args.n
        if args.count is not None:
            kw["draws"] = args.count
    elif args.suite == "counts" and args.count is not None:
        kw["words"] = args.count
    report = verify.run_suite(args.suite, **kw)
    if not args.timing:
        report.pop("seconds", None)
    _write(json.dumps(report, indent=2, sort_keys=True, default=float) + "\n", args.out)
    return 0 if report["passed"] else 1


def cmd_stats(args) -> int:
    cfg = _config(args)
    if args.experiment:
        cfg.experiment = args.experiment
    if cfg.experiment == "rescaled":
        _write(ex.jsonl(ex.emit_rescaled_processes(cfg)), cfg.out)
        return 0
    rows, extras = ex.run_stats(cfg)
    if args.format == "json":
        objs = [{**r.to_json_obj(), **e} for r, e in zip(rows, extras)]
        _write(ex.jsonl(objs), cfg.out)
    else:
        _write(ex.stats_csv(rows), cfg.out)
    if args.summary:
        summary = ex.summarize(rows)
        summary["hard_bound_violations"] = sum(e["d_gt_m"] + e["7d_lt_m"] for e in extras)
        with open(args.summary, "w") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
    bad = sum(e["d_gt_m"] + e["7d_lt_m"] for e in extras)
    return 1 if bad else 0


def cmd_encode(args) -> int:
    out = []
    for obj in _read_jsonl(args.input):
        T = FaceWord(np.asarray(obj["word"], dtype=np.int64), rooted=True)
        u, slot = strip_root(T)
        d = decompose(u)
        rec = d.to_json_obj()
        rec["slot"] = slot
        out.append(rec)
    _write(ex.jsonl(out), args.out)
    return 0


def cmd_decode(args) -> int:
    out = []
    for obj in _read_jsonl(args.input):
        d = from_json_obj(obj)
        d.check()
        T = add_root(assemble(d), int(obj.get("slot", 1)))
        rec = {"word": T.partner.tolist()}
        if not args.no_map:
            rec["triangulation"] = complete_closure(T).to_json_obj()
        out.append(rec)
    _write(ex.jsonl(out), args.out)
    return 0


def cmd_upsilon(args) -> int:
    rng = _rng.stream(args.seed, 0)
    est = upsilon.estimate_upsilon(args.count, rng)
    obj = est.to_json_obj()
    ratios = {}
    for n in _n_list(args) or [8, 16, 32, 64, 128, 256, 512]:
        law = sampler.parameter_law(n)
        ratios[str(n)] = upsilon.count_ratio(law.log_count(), n, est.value)
    obj["count_ratio"] = ratios
    _write(json.dumps(obj, indent=2, sort_keys=True) + "\n", args.out)
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="torusmaps", description="Uniform random toroidal triangulations.")
    sub = p.add_subparsers(dest="verb", required=True)

    def common(sp, count=None):
        sp.add_argument("--n", type=int)
        sp.add_argument("--n-list", dest="n_list")
        sp.add_argument("--count", type=int, default=count)
        sp.add_argument("--replicas", type=int)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--mode", choices=["exact", "float"])
        sp.add_argument("--out")
        sp.add_argument("--format", choices=["json", "csv"], default=None)

    sp = sub.add_parser("sample", help="uniform samples as JSON lines")
    common(sp, count=1)
    sp.add_argument("--no-map", action="store_true", help="skip the closed triangulation")
    sp.set_defaults(fn=cmd_sample)

    sp = sub.add_parser("enumerate", help="every map of a small size")
    common(sp)
    sp.add_argument("--n-max", type=int, default=4)
    sp.add_argument("--no-map", action="store_true")
    sp.set_defaults(fn=cmd_enumerate)

    sp = sub.add_parser("verify", help="run a verification suite")
    sp.add_argument("suite", choices=verify.SUITES)
    common(sp)
    sp.add_argument("--timing", action="store_true", help="report wall-clock seconds (not reproducible)")
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("stats", help="diameter and label-gap table")
    common(sp)
    sp.add_argument("--experiment", choices=["stats", "rescaled"])
    sp.add_argument("--config")
    sp.add_argument("--summary")
    sp.add_argument("--timing", action="store_true", help="fill the runtime_ms column (not reproducible)")
    sp.set_defaults(fn=cmd_stats)

    for verb, fn, helptext in (("encode", cmd_encode, "rooted words to decompositions"),
                               ("decode", cmd_decode, "decompositions to rooted words and maps")):
        sp = sub.add_parser(verb, help=helptext)
        common(sp)
        sp.add_argument("--in", dest="input", default="-")
        sp.add_argument("--no-map", action="store_true")
        sp.set_defaults(fn=fn)

    sp = sub.add_parser("estimate-upsilon", help="Monte Carlo normalising constant")
    common(sp, count=10**6)
    sp.set_defaults(fn=cmd_upsilon)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return int(args.fn(args) or 0)


if __name__ == "__main__":
    sys.exit(main())
