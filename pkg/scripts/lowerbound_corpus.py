"""Write a small corpus of lower-bound instances with manifests and check each one.

Every instance gets a .cftg graph and a .cftm manifest in the output directory;
the mandatory-edge claims are re-verified by brute force before moving on.

    python3 scripts/lowerbound_corpus.py out/
"""
import sys
from pathlib import Path

from colorft.graph import ColoredGraph, format_graph
from colorft.lowerbounds import (build_flow_lb, build_reachability_lb, build_singlepair_lb, build_sourcewise_lb,
                                 format_manifest, vertex_count_ratio)
from colorft.verify import verify_mandatory_edges


def gstar():
    # unit path 0-1-2-3 with a heavy bypass through 4; every pair below is uniquely routed
    return ColoredGraph(5, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (0, 4, 5), (4, 3, 5)])


CORPUS = {
    "sourcewise_s1_d1_n64": lambda: build_sourcewise_lb(1, 1, 64),
    "sourcewise_s2_d2_n200": lambda: build_sourcewise_lb(2, 2, 200),
    "reach_n64_d2_f1": lambda: build_reachability_lb(64, 2, 1),
    "reach_n64_d1_f2": lambda: build_reachability_lb(64, 1, 2),
    "flow_n16_d1_f1_l2": lambda: build_flow_lb(16, 1, 1, 2),
    "singlepair_gstar5": lambda: build_singlepair_lb(gstar(), [(0, 3), (1, 2), (0, 2)]),
}


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    out = Path(argv[0] if argv else "lb_corpus")
    out.mkdir(parents=True, exist_ok=True)
    ok = True
    for name, make in CORPUS.items():
        inst = make()
        (out / f"{name}.cftg").write_text(format_graph(inst.graph))
        (out / f"{name}.cftm").write_text(format_manifest(inst))
        rep = verify_mandatory_edges(inst)
        ok &= rep.passed
        ratio = f"{vertex_count_ratio(inst):.2f}" if "n" in inst.params else "-"
        print(f"{name:26s} n={inst.graph.n:5d} m={inst.graph.m:6d} mandatory={len(inst.mandatory_edges):5d} "
              f"n/n_target={ratio} {rep.status}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
