"""Check the vertex-cover reduction on every small connected graph.

Prints one JSON line per (graph, k) with both oracle answers.

    python scripts/hardness_sweep.py --max-nodes 4
"""
import argparse
import json

from pclabels.hardness import brute_force_vertex_cover, connected_graphs, reduce_vertex_cover
from pclabels.search import SearchConfig, brute_force_optimal


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-nodes", type=int, default=4)
    args = ap.parse_args()
    agree = total = 0
    for n in range(3, args.max_nodes + 1):
        for g in connected_graphs(n):
            for k in range(2, n):
                inst = reduce_vertex_cover(g, k)
                cover = brute_force_vertex_cover(g, k)
                s, err = brute_force_optimal(inst.dataset, SearchConfig(inst.size_bound, list(inst.patterns)))
                names = inst.dataset.names
                total += 1
                agree += cover == (err == 0)
                print(json.dumps({"nodes": n, "edges": [[i + 1, j + 1] for i, j in g.edges], "k": k,
                                  "vertex_cover": cover, "zero_error_label": err == 0,
                                  "best_subset": [names[i] for i in s]}))
    print(json.dumps({"instances": total, "agree": agree}))


if __name__ == "__main__":
    main()
