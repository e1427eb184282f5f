"""Verification suites: exact checks with witnesses, plus the statistical sampler suite.

Every suite returns a report ``{"suite", "passed", "checks": {name: {...}}}``
where each check records how many objects it looked at and up to a few
witnesses of failure.  Exact suites have zero tolerance.
"""

from __future__ import annotations

import collections
import itertools
import time

import numpy as np
from scipy.stats import chisquare

from .. import _rng
from .. import forests as fo
from .. import labels as lb
from .. import paths
from .. import sampler
from ..closure import verify_closure_output
from ..decomp import assemble, d0_bound_check, decompose, shifted_labeling
from ..unicell import add_root, slot_angles, strip_root
from .experiments import replica_index

SUITES = ("counts", "closure", "labels", "decomp", "sampler-uniformity", "appendix")
P_FLOOR = 1e-3


class Check:
    def __init__(self, name: str, keep: int = 5):
        self.name = name
        self.keep = keep
        self.checked = 0
        self.failures = 0
        self.witnesses: list = []
        self.info: dict = {}

    def ok(self, n: int = 1):
        self.checked += n

    def fail(self, witness):
        self.checked += 1
        self.failures += 1
        if len(self.witnesses) < self.keep:
            self.witnesses.append(witness)

    def report(self) -> dict:
        out = {"passed": self.failures == 0, "checked": self.checked, "failures": self.failures}
        if self.witnesses:
            out["witnesses"] = self.witnesses
        out.update(self.info)
        return out


class Report:
    def __init__(self, suite: str):
        self.suite = suite
        self.checks: dict[str, Check] = {}
        self.t0 = time.perf_counter()

    def __getitem__(self, name: str) -> Check:
        if name not in self.checks:
            self.checks[name] = Check(name)
        return self.checks[name]

    def to_json_obj(self) -> dict:
        checks = {k: c.report() for k, c in self.checks.items()}
        return {
            "suite": self.suite,
            "passed": all(c["passed"] for c in checks.values()),
            "seconds": round(time.perf_counter() - self.t0, 3),
            "checks": checks,
        }


def corpus(n: int, count: int, seed: int):
    """Sampled closures used by the closure, labels, decomp and appendix suites."""
    law = sampler.parameter_law(n)
    for i in range(count):
        yield sampler.sample_triangulation(n, seed, replica_index(n, i), law=law)


def enumerated(n_max: int):
    for n in range(1, n_max + 1):
        e = sampler.enumerate_all(n)
        yield n, e


# ---------------------------------------------------------------- counts


def suite_counts(max_size: int = 16, sigma_max: int = 10, words: int = 10**4, seed: int = 0,
                 n_max_oracle: int = 4) -> dict:
    rep = Report("counts")
    c = rep["count_forests"]
    for tau in range(1, max_size + 1):
        for rho in range(0, (max_size - tau) // 4 + 1):
            brute = sum(1 for _ in fo.enumerate_forests(rho, tau))
            if brute == fo.count_forests(rho, tau) == paths.count_forest_words(rho, tau):
                c.ok()
            else:
                c.fail({"rho": rho, "tau": tau, "brute": brute, "formula": fo.count_forests(rho, tau)})
    c = rep["count_motzkin"]
    for sigma in range(0, sigma_max + 1):
        tally = collections.Counter(sum(s) for s in itertools.product((-1, 0, 1), repeat=sigma))
        for gamma in range(-sigma - 1, sigma + 2):
            if tally.get(gamma, 0) == paths.count_motzkin(sigma, gamma):
                c.ok()
            else:
                c.fail({"sigma": sigma, "gamma": gamma})
    c = rep["cycle_lemma"]
    rng = _rng.stream(seed, 1)
    for _ in range(words):
        k = int(rng.integers(1, 4))
        q = int(rng.integers(0, 6))
        p = k * q + int(rng.integers(1, 6))
        letters = np.array(["0"] * p + ["1"] * q)
        rng.shuffle(letters)
        b = "".join(letters)
        got, _ = paths.cycle_lemma_count(b, k)
        if got == p - k * q:
            c.ok()
        else:
            c.fail({"word": b, "k": k, "count": got})
    c = rep["oracle_counts"]
    counts = []
    for n in range(1, n_max_oracle + 1):
        law = sampler.parameter_law(n, "exact")
        e = sampler.enumerate_all(n, close=False)
        brute = sampler.brute_force_words(n)
        same = {w.key() for w in brute} == {w.key() for w in e.words}
        weights_ok = set(e.weight.values()) == {12}
        if same and weights_ok and len(e.words) == law.count and law.total == 3 * len(e.words):
            c.ok()
        else:
            c.fail({"n": n, "enumerated": len(e.words), "brute": len(brute), "law": law.count})
        counts.append(len(e.words))
    c.info["counts"] = counts
    return rep.to_json_obj()


# ---------------------------------------------------------------- closure


def _closure_checks(rep: Report, tri, tag):
    bad = verify_closure_output(tri, full=True)
    c = rep["closure_output"]
    if bad:
        c.fail({"map": tag, "violations": bad[:3]})
    else:
        c.ok()


def suite_closure(n_max_oracle: int = 4, n_list=(50, 200), count: int = 100, seed: int = 0) -> dict:
    rep = Report("closure")
    for n, e in enumerated(n_max_oracle):
        c = rep["injective"]
        if sampler.closures_distinct(e.triangulations):
            c.ok()
        else:
            c.fail({"n": n})
        for i, tri in enumerate(e.triangulations):
            _closure_checks(rep, tri, {"n": n, "index": i})
    for n in n_list:
        for rec in corpus(n, count, seed):
            _closure_checks(rep, rec.triangulation, {"n": n, "seed": rec.seed, "index": rec.index})
    return rep.to_json_obj()


# ---------------------------------------------------------------- labels


def label_map_checks(rep: Report, tri, tag=None, pairs: int = 1000,
                     full_scan_n: int = 100, rng=None):
    lt = lb.LabelTable(tri)
    bad = lb.label_checks(tri, lt)
    for f in bad:
        rep["label_facts"].fail({"map": tag, **f})
    if not bad:
        rep["label_facts"].ok()
    rng = rng or _rng.stream(0, 0)
    bad = lb.distance_bounds(tri, lt, pairs=pairs, rng=rng)
    for f in bad:
        rep["distance_bounds"].fail({"map": tag, **f})
    if not bad:
        rep["distance_bounds"].ok()
    bad = lb.chain_checks(lt, range(tri.n))
    for f in bad:
        rep["successor_chains"].fail({"map": tag, **f})
    if not bad:
        rep["successor_chains"].ok()
    u, slot = strip_root(tri.word)
    d = decompose(u)
    vm = sampler.unrooted_vertex_map(u, slot_angles(u)[slot - 1], tri)
    mw = lt.m[vm]
    sl = shifted_labeling(d, u)
    gap = int(np.abs(sl.s - (mw[sl.r_q] - mw[sl.r_q[0]])).max())
    c = rep["S<=16"]
    c.info["worst"] = max(c.info.get("worst", 0), gap)
    if gap > 16:
        c.fail({"map": tag, "gap": gap})
    else:
        c.ok()
    if tri.n <= full_scan_n:
        bad, worst = d0_bound_check(sl, mw, lambda a, b: lt.mbar(vm[a], vm[b]), 64)
        c = rep["d0<=64"]
        c.info["worst"] = max(c.info.get("worst", 0), worst)
        if bad:
            c.fail({"map": tag, **bad[0]})
        else:
            c.ok()


def suite_labels(n_max_oracle: int = 4, n_list=(50, 200), count: int = 100, seed: int = 0,
                 pairs: int = 1000, full_scan_n: int = 100) -> dict:
    rep = Report("labels")
    rng = _rng.stream(seed, 2)
    for n, e in enumerated(n_max_oracle):
        for i, tri in enumerate(e.triangulations):
            label_map_checks(rep, tri, tag={"n": n, "index": i}, pairs=pairs, full_scan_n=full_scan_n, rng=rng)
    for n in n_list:
        for rec in corpus(n, count, seed):
            label_map_checks(rep, rec.triangulation, tag={"n": n, "index": rec.index}, pairs=pairs,
                             full_scan_n=full_scan_n, rng=rng)
    return rep.to_json_obj()


# ---------------------------------------------------------------- decomposition


def _roundtrip(rep: Report, T, tag):
    u, slot = strip_root(T)
    d = decompose(u)
    c = rep["roundtrip"]
    try:
        d.check()
        again = assemble(d)
    except Exception as exc:  # noqa: BLE001 - recorded as a witness
        c.fail({"map": tag, "error": repr(exc)})
        return
    if again == u and add_root(again, slot) == T:
        c.ok()
    else:
        c.fail({"map": tag})
    sl = shifted_labeling(d, u)
    c = rep["S_bullet_ends"]
    want = sum(g + cc - 1 for g, cc in zip(d.gamma, d.kernel.c))
    if sl.s_bullet[0] == 0 and sl.s_bullet[-1] == want and len(sl.s) == 2 * d.n + 2:
        c.ok()
    else:
        c.fail({"map": tag, "ends": [int(sl.s_bullet[0]), int(sl.s_bullet[-1])], "want": want})


def _forest_roundtrips(rep: Report, count: int, seed: int):
    rng = _rng.stream(seed, 6)
    for _ in range(count):
        rho, tau = int(rng.integers(0, 25)), int(rng.integers(1, 12))
        f = fo.sample_uniform_forest(rho, tau, rng)
        b = fo.encode_word(f)
        g = fo.decode_word(b, rho, tau)
        c = rep["forest_words"]
        if (g.parent, g.label) == (f.parent, f.label) and fo.encode_word(g) == b:
            c.ok()
        else:
            c.fail({"rho": rho, "tau": tau, "word": b})
        _, cf, lab = fo.contour_pair(f)
        h = fo.from_contour(cf, lab)
        c = rep["forest_contours"]
        if (h.parent, h.label) == (f.parent, f.label) and fo.contour_pair(h)[1:] == (cf, lab):
            c.ok()
        else:
            c.fail({"rho": rho, "tau": tau, "word": b})


def suite_decomp(n_max_oracle: int = 4, n_list=(50, 200), count: int = 100, seed: int = 0,
                 forests: int = 1000) -> dict:
    rep = Report("decomp")
    _forest_roundtrips(rep, forests, seed)
    for n, e in enumerated(n_max_oracle):
        for i, T in enumerate(e.words):
            _roundtrip(rep, T, {"n": n, "index": i})
    for n in n_list:
        law = sampler.parameter_law(n)
        for i in range(count):
            rec = sampler.sample_triangulation(n, seed, replica_index(n, i), law=law, close=False)
            _roundtrip(rep, rec.word, {"n": n, "index": rec.index})
    return rep.to_json_obj()


# ---------------------------------------------------------------- sampler


def _chi(rep: Report, name: str, observed, expected, extra=None):
    c = rep[name]
    if len(observed) == 1:
        # a single cell: every draw landed in the support, nothing to test
        c.info.update({"statistic": 0.0, "p_value": 1.0, "cells": 1})
        c.ok()
        return
    res = chisquare(np.asarray(observed, float), np.asarray(expected, float))
    c.info.update({"statistic": float(res.statistic), "p_value": float(res.pvalue), "cells": len(observed)})
    if extra:
        c.info.update(extra)
    if res.pvalue > P_FLOOR:
        c.ok()
    else:
        c.fail({"p_value": float(res.pvalue)})


def uniformity_counts(n: int, draws: int, seed: int) -> tuple[list, np.ndarray]:
    e = sampler.enumerate_all(n, close=False)
    keys = [w.key() for w in e.words]
    index = {k: i for i, k in enumerate(keys)}
    obs = np.zeros(len(keys), dtype=np.int64)
    rng = _rng.stream(seed, 3)
    law = sampler.parameter_law(n, "exact")
    for _ in range(draws):
        w = sampler.sample_triangulation(n, rng, law=law, close=False).word
        obs[index[w.key()]] += 1
    return keys, obs


def suite_sampler(n: int = 3, draws: int = 10**6, param_draws: int = 10**5, forest_draws: int = 20000,
                  seed: int = 0) -> dict:
    rep = Report("sampler-uniformity")
    _, obs = uniformity_counts(n, draws, seed)
    _chi(rep, "triangulations", obs, np.full(len(obs), draws / len(obs)), {"n": n, "draws": draws})
    pm = sampler.parameter_pmf(n)
    ks = list(pm)
    p = np.array([pm[k][0] for k in ks], float)
    p /= p.sum()
    index = {k: i for i, k in enumerate(ks)}
    obs = np.zeros(len(ks), dtype=np.int64)
    rng = _rng.stream(seed, 4)
    law = sampler.parameter_law(n, "exact")
    c = rep["parameters_support"]
    for _ in range(param_draws):
        key = sampler.sample_parameters(n, rng, law).as_tuple()
        if key not in index:
            c.fail({"vector": key})
            continue
        obs[index[key]] += 1
    c.ok(0)
    _chi(rep, "parameters", obs, p * obs.sum(), {"n": n, "draws": param_draws})
    rng = _rng.stream(seed, 5)
    for rho, tau in [(1, 1), (2, 1), (1, 2), (2, 2)]:
        forests = list(fo.enumerate_forests(rho, tau))
        index = {f.canonical(): i for i, f in enumerate(forests)}
        for name, draw in (("gw", fo.sample_gw_forest), ("uniform", fo.sample_uniform_forest)):
            obs = np.zeros(len(forests), dtype=np.int64)
            for _ in range(forest_draws):
                obs[index[draw(rho, tau, rng).canonical()]] += 1
            _chi(rep, f"forests_{name}_{rho}_{tau}", obs, np.full(len(obs), forest_draws / len(obs)))
    return rep.to_json_obj()


# ---------------------------------------------------------------- appendix


def suite_appendix(n_list=(50, 200), count: int = 100, path_count: int = 10, seed: int = 0) -> dict:
    rep = Report("appendix")
    tags: collections.Counter = collections.Counter()
    for n in n_list:
        for i, rec in enumerate(corpus(n, count, seed)):
            tri = rec.triangulation
            lt = lb.LabelTable(tri)
            bad, stats = lb.appendix_walk_checks(tri, lt)
            c = rep["rightmost_walks"]
            c.info["max_h"] = max(c.info.get("max_h", 0), stats["max_h"])
            c.info["max_pruned"] = max(c.info.get("max_pruned", 0), stats["max_pruned"])
            for f in bad:
                c.fail({"n": n, "index": rec.index, **f})
            if not bad:
                c.ok()
            if i < path_count:
                bad, counts = lb.appendix_path_checks(tri, lt)
                tags.update(counts)
                c = rep["shortest_path_subpaths"]
                for f in bad:
                    c.fail({"n": n, "index": rec.index, **f})
                if not bad:
                    c.ok()
    if "shortest_path_subpaths" in rep.checks:
        rep["shortest_path_subpaths"].info["types"] = dict(sorted(tags.items()))
    return rep.to_json_obj()


def run_suite(name: str, **kw) -> dict:
    fn = {
        "counts": suite_counts,
        "closure": suite_closure,
        "labels": suite_labels,
        "decomp": suite_decomp,
        "sampler-uniformity": suite_sampler,
        "appendix": suite_appendix,
    }[name]
    return fn(**kw)
