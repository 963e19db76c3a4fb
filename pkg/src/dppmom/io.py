"""Text file formats.  Every user-facing index is 1-based.

* kernel: CSV, N rows of N decimal fields;
* graph: first line ``n m``, then ``m`` lines ``i j``;
* signs: like a graph file with a third ``+1``/``-1`` column;
* samples: one line per sample with ascending indices separated by spaces,
  an empty line for the empty set.  An optional leading ``# N=<size>``
  comment records the ground-set size.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import InputError
from .graph import UGraph
from .kernel import Kernel, SignAssignment
from .sampler import SampleSet

__all__ = [
    "load_kernel_csv", "save_kernel_csv",
    "load_graph", "save_graph",
    "load_signs", "save_signs",
    "load_samples", "save_samples",
    "write_json",
]


def _read(path) -> str:
    path = Path(path)
    if not path.is_file():
        raise InputError(f"no such file: {path}")
    return path.read_text()


def load_kernel_csv(path, check_spectrum: bool = True, alpha: float | None = None) -> Kernel:
    text = _read(path)
    try:
        rows = [[float(x) for x in line.split(",")] for line in text.splitlines() if line.strip()]
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None
    if not rows or any(len(r) != len(rows) for r in rows):
        raise InputError(f"{path}: kernel must be a square CSV matrix")
    return Kernel(np.array(rows), alpha, checked=check_spectrum)


def save_kernel_csv(K: Kernel | np.ndarray, path) -> None:
    M = K.matrix if isinstance(K, Kernel) else np.asarray(K)
    with open(path, "w") as fh:
        for row in M:
            fh.write(",".join(repr(float(x)) for x in row) + "\n")


def _int_rows(path, text, width):
    rows = []
    for k, line in enumerate(text.splitlines()):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != width:
            raise InputError(f"{path}:{k + 1}: expected {width} fields")
        try:
            rows.append([int(p) for p in parts])
        except ValueError:
            raise InputError(f"{path}:{k + 1}: non-integer field") from None
    return rows


def load_graph(path) -> UGraph:
    rows = _int_rows(path, _read(path), 2)
    if not rows:
        raise InputError(f"{path}: missing 'n m' header")
    (n, m), body = rows[0], rows[1:]
    if len(body) != m:
        raise InputError(f"{path}: header announces {m} edges, found {len(body)}")
    return UGraph.from_edges(n, [(i - 1, j - 1) for i, j in body])


def save_graph(G: UGraph, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"{G.n} {G.m}\n")
        for i, j in G.edges:
            fh.write(f"{i + 1} {j + 1}\n")


def load_signs(path) -> SignAssignment:
    text = _read(path)
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InputError(f"{path}: empty file")
    header = _int_rows(path, lines[0], 2)[0]
    body = _int_rows(path, "\n".join(lines[1:]), 3)
    if len(body) != header[1]:
        raise InputError(f"{path}: header announces {header[1]} edges, found {len(body)}")
    G = UGraph.from_edges(header[0], [(i - 1, j - 1) for i, j, _ in body])
    by_edge = {(min(i, j) - 1, max(i, j) - 1): s for i, j, s in body}
    return SignAssignment(G, tuple(by_edge[e] for e in G.edges))


def save_signs(signs: SignAssignment, path) -> None:
    G = signs.graph
    with open(path, "w") as fh:
        fh.write(f"{G.n} {G.m}\n")
        for (i, j), s in zip(G.edges, signs.signs):
            fh.write(f"{i + 1} {j + 1} {s:+d}\n")


def load_samples(path, N: int | None = None) -> SampleSet:
    """Read a samples file; ``N`` overrides the header, else the max index is used."""
    text = _read(path)
    lines = text.split("\n") if text else []
    if text.endswith("\n"):
        lines.pop()
    header_N = None
    subsets = []
    for k, line in enumerate(lines):
        if line.startswith("#"):
            if "N=" in line:
                try:
                    header_N = int(line.split("N=", 1)[1].split()[0])
                except (ValueError, IndexError):
                    raise InputError(f"{path}:{k + 1}: bad header {line!r}") from None
            continue
        try:
            idx = [int(tok) - 1 for tok in line.split()]
        except ValueError:
            raise InputError(f"{path}:{k + 1}: non-integer index") from None
        if any(i < 0 for i in idx):
            raise InputError(f"{path}:{k + 1}: indices are 1-based")
        subsets.append(idx)
    size = N or header_N or max((max(S) + 1 for S in subsets if S), default=0)
    if size < 1:
        raise InputError(f"{path}: cannot determine the ground-set size")
    return SampleSet.from_subsets(size, subsets)


def save_samples(samples: SampleSet, path, header: bool = True) -> None:
    with open(path, "w") as fh:
        if header:
            fh.write(f"# N={samples.N}\n")
        for row in samples.indicators:
            fh.write(" ".join(str(i + 1) for i in np.flatnonzero(row)) + "\n")


def write_json(obj, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
