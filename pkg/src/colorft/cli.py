"""Command-line front end: build | gen | verify | bench.

Exit codes: 0 success, 1 verification failure, 2 invalid configuration,
3 enumeration cap reached (inconclusive).
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .derived import build_1cft_pairwise_detailed, build_1cft_plus2_spanner_detailed
from .generators import random_colored_graph
from .graph import (ColoredGraph, FaultMode, GraphFormatError, Subgraph, format_graph,
                    format_subgraph, parse_graph, parse_subgraph)
from .hitting import HittingMode
from .lowerbounds import (LowerBoundInstance, build_flow_lb, build_reachability_lb, build_singlepair_lb,
                          build_sourcewise_lb, build_tree_binary, build_tree_T_dq, format_manifest,
                          parse_manifest)
from .paths import make_metric
from .single_pair import construct_1cft_single_pair
from .sourcewise_cft import construct_1cft_sourcewise
from .sourcewise_eft import construct_feft_sourcewise
from .verify import (DEFAULT_CAP, VerificationReport, verify_additive_stretch, verify_distance_preserver,
                     verify_flow_preserver, verify_mandatory_edges, verify_reachability_preserver)

log = logging.getLogger("colorft")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_CAP = 0, 1, 2, 3

BUILD_KINDS = ("cft-sourcewise", "eft-sourcewise", "pairwise", "spanner", "single-pair")
GEN_KINDS = ("sourcewise-lb", "reachability-lb", "flow-lb", "singlepair-lb", "tree-dq", "tree-binary", "random")
VERIFY_KINDS = ("distance", "stretch", "reachability", "flow", "mandatory")
BENCH_KINDS = ("cft-sourcewise", "eft-sourcewise")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    kind: str
    inputs: list[str] = field(default_factory=list)
    output: Optional[str] = None
    manifest: Optional[str] = None
    sources: Optional[list[int]] = None
    pairs: Optional[list[tuple[int, int]]] = None
    f: int = 1
    mode: str = "color"
    delta: int = 1
    sigma: int = 1
    n: int = 16
    q: int = 2
    lam: int = 1
    seed: int = 0
    ell: Optional[int] = None
    hitting: str = "greedy"
    verify: bool = False
    csv: Optional[str] = None
    cap: int = DEFAULT_CAP
    directed: bool = False
    weighted: bool = False
    family: str = "gnp"
    degree: float = 4.0
    grid_n: list[int] = field(default_factory=lambda: [128, 256, 512, 1024])
    grid_sigma: list[int] = field(default_factory=lambda: [1])
    grid_delta: list[int] = field(default_factory=lambda: [1])
    grid_f: list[int] = field(default_factory=lambda: [1])
    seeds: list[int] = field(default_factory=lambda: [0])

    def validate(self) -> None:
        kinds = {"build": BUILD_KINDS, "gen": GEN_KINDS, "verify": VERIFY_KINDS, "bench": BENCH_KINDS}
        if self.command not in kinds:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.kind not in kinds[self.command]:
            raise ConfigError(f"{self.command}: kind must be one of {', '.join(kinds[self.command])}")
        if self.f < 0 or self.lam < 1 or self.cap < 1:
            raise ConfigError("need f >= 0, lam >= 1, cap >= 1")
        if self.mode not in ("color", "edge"):
            raise ConfigError("mode must be 'color' or 'edge'")
        if self.hitting not in ("greedy", "sampled"):
            raise ConfigError("hitting must be 'greedy' or 'sampled'")
        need_inputs = {"build": 1, "verify": 2 if self.kind != "mandatory" else 1}
        if len(self.inputs) < need_inputs.get(self.command, 0):
            raise ConfigError(f"{self.command} needs {need_inputs[self.command]} input file(s)")
        if self.command == "build":
            if self.kind in ("cft-sourcewise", "eft-sourcewise") and not self.sources:
                raise ConfigError(f"{self.kind} needs --sources")
            if self.kind == "pairwise" and not self.pairs:
                raise ConfigError("pairwise needs --pairs")
            if self.kind == "single-pair" and (not self.pairs or len(self.pairs) != 1):
                raise ConfigError("single-pair needs exactly one --pairs s:t")
        if self.command == "verify" and self.kind in ("reachability", "flow") and not self.sources:
            raise ConfigError(f"{self.kind} verification needs --sources (one source)")


# ------------------------------------------------------------------ parsing helpers

def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _pair_list(text: str) -> list[tuple[int, int]]:
    out = []
    for item in text.split(","):
        if not item.strip():
            continue
        try:
            a, b = item.split(":")
            out.append((int(a), int(b)))
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected pairs like 0:5,2:7, got {item!r}") from None
    return out


def _read_graph(path: str) -> ColoredGraph:
    return parse_graph(Path(path).read_text(encoding="utf-8"))


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _check_range(g: ColoredGraph, vertices) -> None:
    bad = [v for v in vertices if not 0 <= v < g.n]
    if bad:
        raise ConfigError(f"vertices {bad} out of range [0, {g.n})")


# ------------------------------------------------------------------ commands

def _build(cfg: RunConfig) -> tuple[Subgraph, dict]:
    g = _read_graph(cfg.inputs[0])
    metric = make_metric(g, cfg.seed)
    hitting = HittingMode(cfg.hitting)
    stats: dict = {"kind": cfg.kind, "n": g.n, "m": g.m, "delta": g.delta, "seed": cfg.seed}
    if cfg.kind == "cft-sourcewise":
        _check_range(g, cfg.sources)
        b = construct_1cft_sourcewise(g, metric, cfg.sources, mode=hitting, seed=cfg.seed)
        h = b.subgraph
        stats.update(sigma=len(set(cfg.sources)), levels=len(b.hitting.sets),
                     hitting_sizes="/".join(str(len(a)) for a in b.hitting.sets))
    elif cfg.kind == "eft-sourcewise":
        _check_range(g, cfg.sources)
        b = construct_feft_sourcewise(g, metric, cfg.sources, cfg.f, mode=hitting, seed=cfg.seed)
        h = b.subgraph
        stats.update(sigma=len(set(cfg.sources)), f=cfg.f, e_near=len(b.e_near), generated=b.generated,
                     hitting_verified=int(b.verified_hitting))
    elif cfg.kind == "pairwise":
        _check_range(g, [v for p in cfg.pairs for v in p])
        b = build_1cft_pairwise_detailed(g, metric, cfg.pairs, cfg.seed, cfg.ell)
        h = b.subgraph
        stats.update(pairs=len(set(cfg.pairs)), ell=b.ell, rounds=b.rounds, attempts=b.attempts,
                     long=len(b.long_triplets), short=len(b.short_triplets))
    elif cfg.kind == "spanner":
        b = build_1cft_plus2_spanner_detailed(g, metric, cfg.ell, mode=hitting, seed=cfg.seed)
        h = b.subgraph
        # greedy S can overshoot (n/ell) ln n on small adversarial inputs; surface it
        target = math.ceil(g.n / b.ell * math.log(max(g.n, 2)))
        stats.update(ell=b.ell, colorful=len(b.colorful), sources=len(b.sources), sources_target=target,
                     sources_over_target=int(len(b.sources) > target))
    else:
        (s, t), = cfg.pairs
        _check_range(g, (s, t))
        b = construct_1cft_single_pair(g, metric, s, t)
        h = b.subgraph
        stats.update(s=s, t=t, colors=len(b.decompositions), dp_edges=len(b.dp))
    stats["h"] = len(h)
    return h, stats


def _verify_build(cfg: RunConfig, g: ColoredGraph, h: Subgraph) -> VerificationReport:
    if cfg.kind in ("cft-sourcewise", "eft-sourcewise"):
        mode = FaultMode.COLOR if cfg.kind == "cft-sourcewise" else FaultMode.EDGE
        f = 1 if cfg.kind == "cft-sourcewise" else cfg.f
        return verify_distance_preserver(g, h, sources=cfg.sources, f=f, mode=mode, cap=cfg.cap)
    if cfg.kind == "spanner":
        return verify_additive_stretch(g, h, 2, 1, cap=cfg.cap)
    return verify_distance_preserver(g, h, cfg.pairs, f=1, cap=cfg.cap)


def _report_exit(rep: VerificationReport) -> int:
    if rep.counterexamples:
        return EXIT_FAIL
    return EXIT_CAP if rep.inconclusive else EXIT_OK


def cmd_build(cfg: RunConfig) -> int:
    h, stats = _build(cfg)
    _write(cfg.output, format_subgraph(h))
    code = EXIT_OK
    if cfg.verify:
        rep = _verify_build(cfg, h.parent, h)
        stats["verify"] = rep.status
        code = _report_exit(rep)
    lines = "".join(f"{k}={v}\n" for k, v in stats.items())
    if cfg.output in (None, "-"):
        sys.stderr.write(lines)
    else:
        sys.stdout.write(lines)
    if cfg.csv:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(stats))
        w.writerow(list(stats.values()))
        _write(cfg.csv, buf.getvalue())
    return code


def _generate(cfg: RunConfig):
    k = cfg.kind
    if k == "sourcewise-lb":
        return build_sourcewise_lb(cfg.sigma, cfg.delta, cfg.n)
    if k == "reachability-lb":
        return build_reachability_lb(cfg.n, cfg.delta, cfg.f)
    if k == "flow-lb":
        return build_flow_lb(cfg.n, cfg.delta, cfg.f, cfg.lam)
    if k == "singlepair-lb":
        if not cfg.inputs or not cfg.pairs:
            raise ConfigError("singlepair-lb needs an input gstar graph and --pairs")
        return build_singlepair_lb(_read_graph(cfg.inputs[0]), cfg.pairs)
    if k == "tree-dq":
        return build_tree_T_dq(cfg.delta, cfg.q).graph
    if k == "tree-binary":
        return build_tree_binary(cfg.delta, directed=cfg.directed).graph
    return random_colored_graph(cfg.n, cfg.delta, cfg.seed, directed=cfg.directed, weighted=cfg.weighted,
                                family=cfg.family, degree=cfg.degree)


def cmd_gen(cfg: RunConfig) -> int:
    out = _generate(cfg)
    if isinstance(out, LowerBoundInstance):
        _write(cfg.output, format_graph(out.graph))
        manifest = cfg.manifest
        if manifest is None and cfg.output not in (None, "-"):
            manifest = str(Path(cfg.output).with_suffix(".cftm"))
        if manifest is None:
            raise ConfigError("writing an instance to stdout needs --manifest")
        _write(manifest, format_manifest(out))
        summary = f"kind={out.kind}\nn={out.graph.n}\nm={out.graph.m}\nmandatory={len(out.mandatory_edges)}\n"
    else:
        _write(cfg.output, format_graph(out))
        summary = f"kind={cfg.kind}\nn={out.n}\nm={out.m}\ndelta={out.delta}\n"
    (sys.stderr if cfg.output in (None, "-") else sys.stdout).write(summary)
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    g = _read_graph(cfg.inputs[0])
    mode = FaultMode(cfg.mode)
    if cfg.kind == "mandatory":
        if len(cfg.inputs) < 2 and cfg.manifest is None:
            raise ConfigError("mandatory verification needs a manifest")
        path = cfg.manifest or cfg.inputs[1]
        rep = verify_mandatory_edges(parse_manifest(Path(path).read_text(encoding="utf-8"), g))
    else:
        h = parse_subgraph(Path(cfg.inputs[1]).read_text(encoding="utf-8"), g)
        if cfg.kind == "distance":
            if not cfg.sources and not cfg.pairs:
                raise ConfigError("distance verification needs --sources or --pairs")
            _check_range(g, (cfg.sources or []) + [v for p in cfg.pairs or [] for v in p])
            rep = verify_distance_preserver(g, h, cfg.pairs, cfg.f, mode, sources=cfg.sources, cap=cfg.cap)
        elif cfg.kind == "stretch":
            rep = verify_additive_stretch(g, h, 2, cfg.f, mode, cap=cfg.cap)
        elif cfg.kind == "reachability":
            _check_range(g, cfg.sources)
            rep = verify_reachability_preserver(g, h, cfg.sources[0], cfg.f, mode, cap=cfg.cap)
        else:
            _check_range(g, cfg.sources)
            rep = verify_flow_preserver(g, h, cfg.sources[0], cfg.f, cfg.lam, mode, cap=cfg.cap)
    _write(cfg.csv or cfg.output, rep.to_csv())
    sys.stderr.write(f"{rep.kind}: {rep.status} ({rep.checks_run} checks, {len(rep.counterexamples)} counterexamples)\n")
    return _report_exit(rep)


def size_bound(n: int, sigma: int, delta: int) -> float:
    """n^(2 - 1/(delta+1)) * sigma^(1/(delta+1)) * max(delta, 1) * ln n."""
    a = 1 / (delta + 1)
    return n ** (2 - a) * sigma ** a * max(delta, 1) * math.log(n)


def eft_size_bound(n: int, sigma: int, f: int) -> float:
    a = 1 / 2 ** f
    return n ** (2 - a) * sigma ** a * math.log(n) ** (1 - a)


def bench_cell(kind: str, n: int, sigma: int, delta: int, f: int, seed: int, family: str, degree: float) -> dict:
    start = time.perf_counter()
    g = random_colored_graph(n, delta, seed, family=family, degree=degree)
    metric = make_metric(g, seed, verify=False)
    sources = sorted(random.Random(seed).sample(range(n), sigma))
    if kind == "cft-sourcewise":
        h = construct_1cft_sourcewise(g, metric, sources, seed=seed).subgraph
        bound = size_bound(n, sigma, delta)
    else:
        h = construct_feft_sourcewise(g, metric, sources, f, seed=seed).subgraph
        bound = eft_size_bound(n, sigma, f)
    log.info("cell n=%d sigma=%d delta=%d f=%d seed=%d: %.2fs", n, sigma, delta, f, seed,
             time.perf_counter() - start)
    return {"kind": kind, "n": n, "sigma": sigma, "delta": delta, "f": f if kind == "eft-sourcewise" else 1,
            "seed": seed, "family": family, "m": g.m, "h": len(h), "ratio": f"{len(h) / bound:.6f}"}


def workers() -> int:
    try:
        return max(1, int(os.environ.get("CFT_THREADS", "1")))
    except ValueError:
        raise ConfigError("CFT_THREADS must be an integer") from None


def run_bench(cfg: RunConfig) -> list[dict]:
    cells = []
    for n in cfg.grid_n:
        for sigma in cfg.grid_sigma:
            if not 1 <= sigma <= n:
                raise ConfigError(f"sigma {sigma} out of range for n {n}")
            for delta in cfg.grid_delta:
                for f in cfg.grid_f if cfg.kind == "eft-sourcewise" else [1]:
                    for seed in cfg.seeds:
                        cells.append((cfg.kind, n, sigma, delta, f, seed, cfg.family, cfg.degree))
    k = workers()
    if k == 1:
        rows = [bench_cell(*c) for c in cells]
    else:
        with ProcessPoolExecutor(max_workers=k) as pool:
            rows = list(pool.map(bench_cell, *zip(*cells)))
    rows.sort(key=lambda r: (r["n"], r["sigma"], r["delta"], r["f"], r["seed"]))
    return rows


def cmd_bench(cfg: RunConfig) -> int:
    rows = run_bench(cfg)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else ["kind"], lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    _write(cfg.csv or cfg.output, buf.getvalue())
    return EXIT_OK


def run(cfg: RunConfig) -> int:
    try:
        cfg.validate()
        return {"build": cmd_build, "gen": cmd_gen, "verify": cmd_verify, "bench": cmd_bench}[cfg.command](cfg)
    except (ConfigError, GraphFormatError, ValueError, FileNotFoundError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG


# ------------------------------------------------------------------ argparse

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="colorft", description="Color-fault-tolerant preservers.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--csv")
        sp.add_argument("--cap", type=int, default=DEFAULT_CAP, help="max fault-set x pair checks")

    b = sub.add_parser("build", help="build a preserver or spanner and write its edge-id list")
    b.add_argument("--kind", required=True, choices=BUILD_KINDS)
    b.add_argument("--sources", type=_int_list)
    b.add_argument("--pairs", type=_pair_list, help="s:t pairs, comma separated")
    b.add_argument("--f", type=int, default=1)
    b.add_argument("--ell", type=int)
    b.add_argument("--hitting", default="greedy", choices=("greedy", "sampled"))
    b.add_argument("--verify", action="store_true")
    b.add_argument("input")
    b.add_argument("output", nargs="?")
    common(b)

    g = sub.add_parser("gen", help="generate an instance (cftg) and its manifest")
    g.add_argument("--kind", required=True, choices=GEN_KINDS)
    for name, default in (("sigma", 1), ("delta", 1), ("n", 16), ("q", 2), ("f", 1), ("lam", 1)):
        g.add_argument(f"--{name}", type=int, default=default)
    g.add_argument("--pairs", type=_pair_list)
    g.add_argument("--directed", action="store_true")
    g.add_argument("--weighted", action="store_true")
    g.add_argument("--family", default="gnp", choices=("gnp", "ring"))
    g.add_argument("--degree", type=float, default=4.0)
    g.add_argument("--manifest")
    g.add_argument("--out", dest="output")
    g.add_argument("input", nargs="?", help="gstar graph for singlepair-lb")
    common(g)

    v = sub.add_parser("verify", help="brute-force verification, CSV report")
    v.add_argument("--kind", required=True, choices=VERIFY_KINDS)
    v.add_argument("--sources", type=_int_list)
    v.add_argument("--pairs", type=_pair_list)
    v.add_argument("--f", type=int, default=1)
    v.add_argument("--mode", default="color", choices=("color", "edge"))
    v.add_argument("--lam", type=int, default=1)
    v.add_argument("--manifest")
    v.add_argument("graph")
    v.add_argument("subgraph", nargs="?", help="cfth edge list (or manifest for --kind mandatory)")
    common(v)

    bn = sub.add_parser("bench", help="size sweep over a parameter grid")
    bn.add_argument("--kind", default="cft-sourcewise", choices=BENCH_KINDS)
    bn.add_argument("--n", dest="grid_n", type=_int_list, default=[128, 256, 512, 1024])
    bn.add_argument("--sigma", dest="grid_sigma", type=_int_list, default=[1])
    bn.add_argument("--delta", dest="grid_delta", type=_int_list, default=[1])
    bn.add_argument("--f", dest="grid_f", type=_int_list, default=[1])
    bn.add_argument("--seeds", type=_int_list, default=[0])
    bn.add_argument("--family", default="gnp", choices=("gnp", "ring"))
    bn.add_argument("--degree", type=float, default=4.0)
    bn.add_argument("--out", dest="output")
    common(bn)
    return p


def config_from_args(argv: Optional[Sequence[str]] = None) -> tuple[RunConfig, bool]:
    parser = _parser()
    parsed, extra = parser.parse_known_args(argv)
    # file names given after options land in ``extra``; anything else is an error
    if any(x.startswith("-") and x != "-" for x in extra):
        parser.error(f"unrecognized arguments: {' '.join(extra)}")
    ns = vars(parsed)
    verbose = ns.pop("verbose")
    command = ns.pop("command")
    files = [ns.pop(k, None) for k in ("input", "output", "graph", "subgraph")]
    if command in ("build", "verify"):
        files = [x for x in files if x] + extra
        if command == "build":
            ns["output"] = files[1] if len(files) > 1 else None
            files = files[:1] + files[2:]
        extra = []
    else:
        ns["output"] = files[1]
        files = [x for x in files[:1] if x]
    if extra or (command == "build" and len(files) > 1) or (command == "verify" and len(files) > 2):
        parser.error("too many file arguments")
    inputs = files
    cfg = RunConfig(command=command, kind=ns.pop("kind"), inputs=inputs)
    for key, value in ns.items():
        if value is not None:
            setattr(cfg, key, value)
    return cfg, verbose


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cfg, verbose = config_from_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with status 2
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(message)s")
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
