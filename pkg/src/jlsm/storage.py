"""Text file formats: datasets, persisted chains, and CSV helpers.

Everything is plain delimited text for auditability.  Floats are written
with repr precision so a persist/load/persist cycle is byte-identical.
"""

import csv
import os

import numpy as np

from .evaluate import PosteriorChain
from .model import Dataset, Family


class DataFormatError(ValueError):
    """A data file failed to parse or violates a structural constraint."""


def _fmt(x):
    return repr(float(x))


def write_dataset(dataset, network_path, attributes_path):
    """Adjacency as an edge list, attributes as tab-separated text with NA."""
    n = dataset.n
    with open(network_path, "w") as fh:
        fh.write(f"nodes {n}\n")
        iu = np.triu_indices(n, k=1)
        for i, j in zip(*iu):
            if dataset.adjacency[i, j]:
                fh.write(f"{i} {j}\n")
    with open(attributes_path, "w") as fh:
        q = dataset.q
        fh.write("\t".join(f"y{j}" for j in range(q)) + "\n")
        for i in range(n):
            cells = [
                _fmt(dataset.attributes[i, j]) if dataset.missing_mask[i, j] else "NA"
                for j in range(q)
            ]
            fh.write("\t".join(cells) + "\n")


def read_dataset(network_path, attributes_path, family):
    """Inverse of write_dataset; raises DataFormatError with line numbers."""
    with open(network_path) as fh:
        header = fh.readline().split()
        if len(header) != 2 or header[0] != "nodes":
            raise DataFormatError(f"{network_path}:1: expected 'nodes <n>' header")
        try:
            n = int(header[1])
        except ValueError:
            raise DataFormatError(f"{network_path}:1: bad node count") from None
        A = np.zeros((n, n), dtype=np.int8)
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            try:
                i, j = int(parts[0]), int(parts[1])
                assert len(parts) == 2
            except (ValueError, IndexError, AssertionError):
                raise DataFormatError(
                    f"{network_path}:{lineno}: expected 'i j', got {line!r}"
                ) from None
            if not (0 <= i < n and 0 <= j < n):
                raise DataFormatError(f"{network_path}:{lineno}: node out of range")
            if i == j:
                raise DataFormatError(f"{network_path}:{lineno}: self-loop rejected")
            A[i, j] = A[j, i] = 1

    with open(attributes_path) as fh:
        header_line = fh.readline().rstrip("\n")
        names = header_line.split("\t") if header_line else []
        q = len(names)
        Y = np.zeros((n, q))
        mask = np.ones((n, q), dtype=bool)
        row = 0
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line and q > 0:
                continue
            if row >= n:
                raise DataFormatError(f"{attributes_path}:{lineno}: too many rows")
            cells = line.split("\t") if q else []
            if len(cells) != q:
                raise DataFormatError(
                    f"{attributes_path}:{lineno}: expected {q} cells, got {len(cells)}"
                )
            for j, cell in enumerate(cells):
                if cell == "NA":
                    mask[row, j] = False
                else:
                    try:
                        Y[row, j] = float(cell)
                    except ValueError:
                        raise DataFormatError(
                            f"{attributes_path}:{lineno}: bad number {cell!r}"
                        ) from None
            row += 1
        if row != n:
            raise DataFormatError(f"{attributes_path}: expected {n} rows, got {row}")
    return Dataset(A, Y, family, mask)


def _write_rows(path, rows):
    with open(path, "w") as fh:
        for row in rows:
            fh.write("\t".join(_fmt(x) for x in np.asarray(row).ravel()) + "\n")


def _write_ragged(path, mats):
    # one kept iteration per row; the leading field is k since it may vary
    with open(path, "w") as fh:
        for m in mats:
            m = np.asarray(m)
            fields = [str(m.shape[1])] + [_fmt(x) for x in m.ravel()]
            fh.write("\t".join(fields) + "\n")


def _read_rows(path):
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            out.append(np.array([float(x) for x in line.split("\t")] if line else []))
    return out


def _read_ragged(path, rows_per_mat):
    out = []
    with open(path) as fh:
        for line in fh:
            fields = line.split()
            if not fields:
                continue
            k = int(fields[0])
            flat = np.array([float(x) for x in fields[1:]])
            out.append(flat.reshape(rows_per_mat, k))
    return out


def persist_chain(chain, directory):
    """Write a chain as a directory of flat files plus a manifest."""
    os.makedirs(directory, exist_ok=True)
    p = lambda name: os.path.join(directory, name)
    _write_rows(p("alpha.tsv"), chain.alphas)
    _write_rows(p("gamma.tsv"), chain.gammas)
    _write_rows(p("sigma2.tsv"), chain.sigma2s)
    _write_ragged(p("Z.tsv"), chain.Zs)
    _write_ragged(p("B.tsv"), chain.Bs)
    with open(p("trace.tsv"), "w") as fh:
        fh.write("kstar\tloglik\n")
        for ks, ll in zip(chain.kstar, chain.loglik):
            fh.write(f"{int(ks)}\t{_fmt(ll)}\n")
    if chain.imputed:
        _write_rows(p("imputed.tsv"), chain.imputed)
    with open(p("manifest.txt"), "w") as fh:
        fh.write(f"family={chain.family.value}\n")
        fh.write(f"kept={len(chain)}\n")
        for key in sorted(chain.meta):
            fh.write(f"{key}={chain.meta[key]}\n")


def load_chain(directory, expected_digest=None):
    """Reconstruct a persisted chain; refuses on config-digest mismatch."""
    p = lambda name: os.path.join(directory, name)
    meta = {}
    with open(p("manifest.txt")) as fh:
        for line in fh:
            key, _, value = line.strip().partition("=")
            meta[key] = value
    if expected_digest is not None and meta.get("config_digest") != expected_digest:
        raise DataFormatError(
            f"manifest config digest {meta.get('config_digest')} does not match "
            f"expected {expected_digest}"
        )
    family = Family(meta.pop("family"))
    kept = int(meta.pop("kept"))
    alphas = _read_rows(p("alpha.tsv"))
    gammas = _read_rows(p("gamma.tsv"))
    sigma2s = _read_rows(p("sigma2.tsv"))
    n = alphas[0].size if alphas else 0
    q = gammas[0].size if gammas else 0
    Zs = _read_ragged(p("Z.tsv"), n)
    Bs = _read_ragged(p("B.tsv"), q)
    kstar, loglik = [], []
    with open(p("trace.tsv")) as fh:
        fh.readline()
        for line in fh:
            a, b = line.split()
            kstar.append(int(a))
            loglik.append(float(b))
    imputed = None
    if os.path.exists(p("imputed.tsv")):
        imputed = [row.reshape(n, q) for row in _read_rows(p("imputed.tsv"))]
    chain = PosteriorChain(
        family=family,
        alphas=alphas,
        gammas=gammas,
        Zs=Zs,
        Bs=Bs,
        sigma2s=sigma2s,
        kstar=np.array(kstar, dtype=np.int64),
        loglik=np.array(loglik),
        imputed=imputed,
        meta=meta,
    )
    if len(chain) != kept:
        raise DataFormatError(f"manifest says {kept} kept iterations, found {len(chain)}")
    return chain


def write_csv(path, rows, fieldnames=None):
    """Write a list of dict rows as CSV."""
    rows = list(rows)
    if fieldnames is None:
        fieldnames = list(rows[0].keys()) if rows else []
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)
