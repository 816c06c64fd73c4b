"""Plain-text matrix file format for auditable model/gain exports.

Layout (one or more matrices per file):

    # mavigc matrix v1
    matrix <name> <rows> <cols>
    rowlabels <label> ...      (optional)
    collabels <label> ...      (optional)
    <row of numbers, space separated, repr round-trip precision>
    ...

Values are written with ``repr`` so a read-back reproduces the float64
bits exactly.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

HEADER = "# mavigc matrix v1"


def write_matrices(path, matrices) -> None:
    """Write named matrices.

    ``matrices`` maps name -> array or (array, row_labels, col_labels).
    """
    path = Path(path)
    with open(path, "w") as fh:
        fh.write(HEADER + "\n")
        for name, entry in matrices.items():
            if isinstance(entry, tuple):
                mat, row_labels, col_labels = entry
            else:
                mat, row_labels, col_labels = entry, None, None
            mat = np.atleast_2d(np.asarray(mat, dtype=float))
            fh.write(f"matrix {name} {mat.shape[0]} {mat.shape[1]}\n")
            if row_labels is not None:
                fh.write("rowlabels " + " ".join(row_labels) + "\n")
            if col_labels is not None:
                fh.write("collabels " + " ".join(col_labels) + "\n")
            for row in mat:
                fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def read_matrices(path):
    """Read a matrix file; returns name -> (array, row_labels, col_labels)."""
    path = Path(path)
    out = {}
    with open(path) as fh:
        first = fh.readline().rstrip("\n")
        if first != HEADER:
            raise ValueError(f"{path}: not a mavigc matrix file")
        line = fh.readline()
        while line:
            parts = line.split()
            if not parts:
                line = fh.readline()
                continue
            if parts[0] != "matrix" or len(parts) != 4:
                raise ValueError(f"{path}: malformed matrix header: {line!r}")
            name, rows, cols = parts[1], int(parts[2]), int(parts[3])
            row_labels = col_labels = None
            line = fh.readline()
            while line.split() and line.split()[0] in ("rowlabels", "collabels"):
                toks = line.split()
                if toks[0] == "rowlabels":
                    row_labels = tuple(toks[1:])
                else:
                    col_labels = tuple(toks[1:])
                line = fh.readline()
            data = []
            for _ in range(rows):
                vals = [float(v) for v in line.split()]
                if len(vals) != cols:
                    raise ValueError(f"{path}: row length mismatch in {name}")
                data.append(vals)
                line = fh.readline()
            out[name] = (np.array(data), row_labels, col_labels)
    return out
