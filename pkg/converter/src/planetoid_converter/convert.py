"""Assemble portable dataset directories from the original Planetoid pickles.

The upstream distribution ships, per dataset, seven pickled blocks plus a
plain-text test-index file:

- ``ind.<name>.x`` / ``ind.<name>.y``        features/one-hot labels of the
                                             labeled training nodes
- ``ind.<name>.tx`` / ``ind.<name>.ty``      features/labels of the test nodes
- ``ind.<name>.allx`` / ``ind.<name>.ally``  features/labels of all
                                             non-test nodes
- ``ind.<name>.graph``                       adjacency lists, node -> [node]
- ``ind.<name>.test.index``                  position of each test node in the
                                             final ordering, one per line

The final node ordering is ``vstack(allx, tx)`` with the test block permuted
so that row ``test.index[i]`` holds the i-th test node. Citeseer's test index
skips a few positions; those rows correspond to isolated papers that upstream
never assigned features or labels, and they become explicit zero rows here,
excluded from every split.

The emitted directory follows the portable format: canonical sorted
``edges.csv`` (u < v once each, no self-loops), ``features.csv`` triples
sorted by (node, feature index), ``labels.csv`` for every node, split arrays,
and SHA-256 checksums. Sorting makes reconversion byte-identical.
"""

from __future__ import annotations

import hashlib
import json
import os
import pickle
import warnings

import numpy as np
import scipy.sparse as sp

FORMAT_VERSION = 1

DATASET_NAMES = ("cora", "citeseer", "pubmed")

# Published per-dataset summary counts used for the conversion report.
PUBLISHED_COUNTS = {
    "cora": {"nodes": 2708, "edges": 5429, "features": 1433, "classes": 7,
             "train": 140, "test": 1000},
    "citeseer": {"nodes": 3327, "edges": 4732, "features": 3703, "classes": 6,
                 "train": 120, "test": 1000},
    "pubmed": {"nodes": 19717, "edges": 44338, "features": 500, "classes": 3,
               "train": 60, "test": 1000},
}

VALIDATION_SIZE = 500

_PICKLE_PARTS = ("x", "y", "tx", "ty", "allx", "ally", "graph")


class ConversionError(Exception):
    """Upstream bundle is missing, undecodable, or internally inconsistent."""


def _load_pickle(path):
    if not os.path.isfile(path):
        raise ConversionError(f"{path}: file missing")
    try:
        with open(path, "rb") as f, warnings.catch_warnings():
            # the originals were serialized under python 2 and reference
            # scipy module paths that have since moved
            warnings.simplefilter("ignore", DeprecationWarning)
            return pickle.load(f, encoding="latin1")
    except (pickle.UnpicklingError, EOFError, UnicodeDecodeError) as exc:
        raise ConversionError(f"{path}: undecodable container ({exc})") from exc


def _load_test_index(path) -> np.ndarray:
    if not os.path.isfile(path):
        raise ConversionError(f"{path}: file missing")
    values = []
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                values.append(int(line))
            except ValueError:
                raise ConversionError(
                    f"{path}:{line_no}: not an integer: {line!r}") from None
    if not values:
        raise ConversionError(f"{path}: empty test index")
    return np.array(values, dtype=np.int64)


def load_bundle(input_dir, name: str) -> dict:
    """Read the eight upstream files for one dataset."""
    bundle = {}
    for part in _PICKLE_PARTS:
        bundle[part] = _load_pickle(os.path.join(input_dir, f"ind.{name}.{part}"))
    bundle["test_index"] = _load_test_index(
        os.path.join(input_dir, f"ind.{name}.test.index"))
    return bundle


def _as_lil(matrix, what: str):
    if not sp.issparse(matrix):
        raise ConversionError(f"{what}: expected a sparse matrix, got {type(matrix)!r}")
    return matrix.tolil()


def assemble(bundle: dict) -> dict:
    """Merge the upstream blocks into full-graph arrays in final node order."""
    allx = _as_lil(bundle["allx"], "allx")
    tx = _as_lil(bundle["tx"], "tx")
    ally = np.asarray(bundle["ally"])
    ty = np.asarray(bundle["ty"])
    y = np.asarray(bundle["y"])
    test_idx = bundle["test_index"]

    if allx.shape[1] != tx.shape[1]:
        raise ConversionError(
            f"feature width mismatch: allx {allx.shape[1]} vs tx {tx.shape[1]}")
    if ally.shape[0] != allx.shape[0] or ty.shape[0] != tx.shape[0]:
        raise ConversionError("label block row counts do not match feature blocks")
    if np.unique(test_idx).size != test_idx.size:
        raise ConversionError("test index contains duplicates")
    if test_idx.size != tx.shape[0]:
        raise ConversionError(
            f"test index lists {test_idx.size} nodes but tx has {tx.shape[0]} rows")

    # Positions skipped inside the test range belong to isolated nodes that
    # upstream dropped; materialize them as zero rows so ids stay contiguous.
    sorted_idx = np.sort(test_idx)
    lo, hi = int(sorted_idx[0]), int(sorted_idx[-1])
    if lo != allx.shape[0]:
        raise ConversionError(
            f"test range starts at {lo}, expected {allx.shape[0]} (end of allx)")
    span = hi - lo + 1
    isolated = span - test_idx.size
    if isolated:
        tx_ext = sp.lil_matrix((span, tx.shape[1]), dtype=tx.dtype)
        tx_ext[sorted_idx - lo, :] = tx[np.argsort(test_idx), :]
        ty_ext = np.zeros((span, ty.shape[1]), dtype=ty.dtype)
        ty_ext[sorted_idx - lo, :] = ty[np.argsort(test_idx), :]
        features = sp.vstack([allx.tocsr(), tx_ext.tocsr()]).tolil()
        labels_onehot = np.vstack([ally, ty_ext])
    else:
        features = sp.vstack([allx.tocsr(), tx.tocsr()]).tolil()
        labels_onehot = np.vstack([ally, ty])
        # the permutation below still applies when the file is shuffled
        features[test_idx, :] = features[sorted_idx, :]
        labels_onehot[test_idx, :] = labels_onehot[sorted_idx, :]

    num_nodes = features.shape[0]
    graph = bundle["graph"]
    edge_mentions = 0
    self_loop_mentions = 0
    pairs = set()
    for u, nbrs in graph.items():
        u = int(u)
        if not 0 <= u < num_nodes:
            raise ConversionError(f"graph: node id {u} out of range [0, {num_nodes})")
        for v in nbrs:
            v = int(v)
            if not 0 <= v < num_nodes:
                raise ConversionError(
                    f"graph: neighbor id {v} out of range [0, {num_nodes})")
            edge_mentions += 1
            if u == v:
                self_loop_mentions += 1
            else:
                pairs.add((u, v) if u < v else (v, u))

    labels = labels_onehot.argmax(axis=1).astype(np.int64)
    unlabeled = int((labels_onehot.sum(axis=1) == 0).sum())

    train_ids = list(range(y.shape[0]))
    val_ids = list(range(y.shape[0], y.shape[0] + VALIDATION_SIZE))
    test_ids = [int(i) for i in sorted_idx]
    if val_ids and val_ids[-1] >= num_nodes:
        raise ConversionError("validation range extends past the node count")

    return {
        "features": features.tocsr(),
        "labels": labels,
        "num_classes": int(labels_onehot.shape[1]),
        "edges": sorted(pairs),
        "splits": {"train": train_ids, "val": val_ids, "test": test_ids},
        "edge_mentions": edge_mentions,
        "self_loop_mentions": self_loop_mentions,
        "isolated_test_rows": int(isolated),
        "zero_label_rows": unlabeled,
    }


def _format_value(v: float) -> str:
    return repr(int(v)) + ".0" if float(v).is_integer() else repr(float(v))


def write_portable(out_dir, name: str, assembled: dict) -> dict:
    """Emit the six portable files; returns their checksums."""
    os.makedirs(out_dir, exist_ok=True)
    features = assembled["features"]
    features.sort_indices()
    coo = features.tocoo()
    order = np.lexsort((coo.col, coo.row))
    triples = zip(coo.row[order], coo.col[order], coo.data[order])

    meta = {
        "format_version": FORMAT_VERSION,
        "name": name,
        "num_nodes": int(features.shape[0]),
        "num_features": int(features.shape[1]),
        "num_classes": assembled["num_classes"],
        "feature_nnz": int(features.nnz),
        "num_undirected_edges": len(assembled["edges"]),
    }
    contents = {
        "meta.json": json.dumps(meta, indent=2, sort_keys=True) + "\n",
        "edges.csv": "".join(f"{u},{v}\n" for u, v in assembled["edges"]),
        "features.csv": "".join(
            f"{n},{i},{_format_value(v)}\n" for n, i, v in triples),
        "labels.csv": "".join(
            f"{n},{int(c)}\n" for n, c in enumerate(assembled["labels"])),
        "splits.json": json.dumps(assembled["splits"], indent=2, sort_keys=True) + "\n",
    }
    checksums = {}
    for fname, text in contents.items():
        blob = text.encode("utf-8")
        with open(os.path.join(out_dir, fname), "wb") as f:
            f.write(blob)
        checksums[fname] = hashlib.sha256(blob).hexdigest()
    with open(os.path.join(out_dir, "checksums.json"), "w", encoding="utf-8") as f:
        json.dump(checksums, f, indent=2, sort_keys=True)
        f.write("\n")
    return checksums


def convert(input_dir, name: str, output_dir) -> dict:
    """Convert one dataset and return the report dict."""
    if name not in DATASET_NAMES:
        raise ConversionError(
            f"unknown dataset {name!r}; expected one of {DATASET_NAMES}")
    bundle = load_bundle(input_dir, name)
    assembled = assemble(bundle)
    checksums = write_portable(output_dir, name, assembled)

    published = PUBLISHED_COUNTS[name]
    emitted_edges = len(assembled["edges"])
    report = {
        "dataset": name,
        "output_dir": str(output_dir),
        "nodes": int(assembled["features"].shape[0]),
        "features": int(assembled["features"].shape[1]),
        "classes": assembled["num_classes"],
        "edges_emitted": emitted_edges,
        "edges_published": published["edges"],
        "edge_delta": emitted_edges - published["edges"],
        "edge_mentions": assembled["edge_mentions"],
        "self_loop_mentions": assembled["self_loop_mentions"],
        "isolated_test_rows": assembled["isolated_test_rows"],
        "zero_label_rows": assembled["zero_label_rows"],
        "splits": {k: len(v) for k, v in assembled["splits"].items()},
        "published": published,
        "checksums": checksums,
    }
    return report
