#!/usr/bin/env python3
"""Convert the MUTAG copy bundled with the `graphkernels` PyPI sdist
(graphkernels/data.mutag, a numpy array of pickled igraph graphs) into the
TU benchmark file layout.

The bundled copy carries node labels, edge labels and structure but no
class labels, so no DS_graph_labels.txt is written. igraph is not needed:
the pickled graphs are decoded from their constructor arguments.

usage: convert_graphkernels_mutag.py path/to/data.mutag out_dir
"""
import os
import pickle
import sys

from numpy.lib import format as npformat


class _GraphArgs:
    def __init__(self, *args):
        self.args = args

    def __setstate__(self, state):
        pass


class _Unpickler(pickle.Unpickler):
    def find_class(self, module, name):
        if (module, name) == ("igraph", "Graph"):
            return _GraphArgs
        return super().find_class(module, name)


def main():
    src, out = sys.argv[1], sys.argv[2]
    with open(src, "rb") as f:
        version = npformat.read_magic(f)
        npformat._read_array_header(f, version)
        graphs = _Unpickler(f, encoding="latin1").load()

    os.makedirs(out, exist_ok=True)
    prefix = os.path.join(out, "MUTAG")
    offset = 0
    with open(prefix + "_A.txt", "w") as fa, \
            open(prefix + "_graph_indicator.txt", "w") as fi, \
            open(prefix + "_node_labels.txt", "w") as fn, \
            open(prefix + "_edge_labels.txt", "w") as fe:
        for gid, g in enumerate(graphs, start=1):
            n, edges, _directed, _gattr, vattr, eattr = g.args
            for lab in vattr["label"]:
                fi.write(f"{gid}\n")
                fn.write(f"{int(lab)}\n")
            for (u, v), lab in zip(edges, eattr["label"]):
                a, b = u + offset + 1, v + offset + 1
                fa.write(f"{a}, {b}\n{b}, {a}\n")
                fe.write(f"{int(lab)}\n{int(lab)}\n")
            offset += n


if __name__ == "__main__":
    main()
