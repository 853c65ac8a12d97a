"""Exact top-k cosine neighborhoods with deterministic ordering and an on-disk cache.

Search is brute force on purpose: the evaluation metrics are set-membership
tests, and an approximate index could silently bias them.  Throughput comes
from running batched dot products against the row-normalized matrix.  Ties
are broken by ascending vocabulary index so repeated runs produce identical
tables.
"""

import json
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import CacheFormatError, StaleCacheError, UnknownTokenError, ZeroVectorError
from .vectors import EmbeddingModel


@dataclass(frozen=True)
class NeighborSet:
    """Ordered top-k cosine neighborhood of one query word in one model."""

    query: str
    k_requested: int
    model_name: str
    entries: tuple[tuple[str, float], ...]

    def __post_init__(self):
        if len(self.entries) > self.k_requested:
            raise ValueError("more entries than requested")
        previous = None
        for token, score in self.entries:
            if token == self.query:
                raise ValueError("query token appears in its own neighborhood")
            if previous is not None and score > previous:
                raise ValueError("scores are not non-increasing")
            previous = score

    def tokens(self) -> list[str]:
        return [t for t, _ in self.entries]


@dataclass
class BatchResult:
    """Per-query neighbor sets plus the queries that had to be skipped."""

    neighbor_sets: list[NeighborSet]
    skipped: list[str]

    def by_query(self) -> dict[str, NeighborSet]:
        return {ns.query: ns for ns in self.neighbor_sets}


def cosine(u, v) -> float:
    """Cosine similarity of two equal-length, nonzero vectors, clamped to [-1, 1]."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape or u.ndim != 1:
        raise ValueError(f"vector shapes differ: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ZeroVectorError("cosine is undefined for all-zero vectors")
    return min(1.0, max(-1.0, float(np.dot(u, v)) / (nu * nv)))


def normalize_rows(model: EmbeddingModel) -> EmbeddingModel:
    """Copy of the model with unit-length rows; zero rows stay zero and are flagged."""
    unit = np.array(model.unit_matrix())
    return EmbeddingModel(
        name=model.name,
        dim=model.dim,
        vocab=list(model.vocab),
        matrix=unit,
        normalized=True,
        zero_rows=model.zero_rows,
        source_digest=model.source_digest,
    )


def _select_top(scores: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k best scores, ordered by (descending score, ascending index).

    Exact also under ties: argpartition fixes the boundary score, then every
    index strictly above it is taken and the remaining slots are filled with
    the lowest indices at the boundary score.
    """
    n_candidates = int(np.count_nonzero(scores > -np.inf))
    kk = min(k, n_candidates)
    if kk == 0:
        return np.empty(0, dtype=np.intp)
    if kk < len(scores):
        part = np.argpartition(-scores, kk - 1)[:kk]
        boundary = scores[part].min()
        above = np.flatnonzero(scores > boundary)
        at_boundary = np.flatnonzero(scores == boundary)
        chosen = np.concatenate([above, at_boundary[: kk - above.size]])
    else:
        chosen = np.flatnonzero(scores > -np.inf)
    order = np.lexsort((chosen, -scores[chosen]))
    return chosen[order]


def _query_scores(model: EmbeddingModel, row: int) -> np.ndarray:
    unit = model.unit_matrix()
    scores = unit @ unit[row]
    scores[row] = -np.inf
    if model.zero_rows:
        scores[list(model.zero_rows)] = -np.inf
    return scores


def top_k(model: EmbeddingModel, query: str, k: int) -> NeighborSet:
    """Exact k nearest neighbors of ``query`` by cosine similarity.

    The query itself and zero-vector rows are excluded from the candidates.
    Raises UnknownTokenError for out-of-vocabulary queries and ZeroVectorError
    when the query row is all zeros.
    """
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    row = model.index.get(query)
    if row is None:
        raise UnknownTokenError(f"token {query!r} not in model {model.name!r}")
    if row in model.zero_rows:
        raise ZeroVectorError(f"query {query!r} has a zero vector in {model.name!r}")
    if k == 0:
        return NeighborSet(query, 0, model.name, ())
    scores = _query_scores(model, row)
    idx = _select_top(scores, k)
    entries = tuple((model.vocab[i], float(scores[i])) for i in idx)
    return NeighborSet(query, k, model.name, entries)


def top_k_batch(
    model: EmbeddingModel,
    queries: list[str],
    k: int,
    workers: int = 1,
) -> BatchResult:
    """Elementwise top_k over many queries; unknown or zero-vector queries are skipped.

    Results are in input order and independent of the worker count.
    """
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    rows: list[int] = []
    kept: list[str] = []
    skipped: list[str] = []
    for q in queries:
        row = model.index.get(q)
        if row is None or row in model.zero_rows:
            skipped.append(q)
        else:
            kept.append(q)
            rows.append(row)

    model.unit_matrix()  # materialize once, outside the worker threads

    # Every query is scored by the same matrix-vector product as top_k, so
    # the result is bitwise identical however the batch is sharded.
    def run_one(pos: int) -> NeighborSet:
        scores = _query_scores(model, rows[pos])
        idx = _select_top(scores, k)
        entries = tuple((model.vocab[i], float(scores[i])) for i in idx)
        return NeighborSet(kept[pos], k, model.name, entries)

    if workers > 1 and len(rows) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            neighbor_sets = list(pool.map(run_one, range(len(rows))))
    else:
        neighbor_sets = [run_one(pos) for pos in range(len(rows))]
    return BatchResult(neighbor_sets=neighbor_sets, skipped=skipped)


def cache_path(cache_dir, model_name: str, k: int) -> str:
    return os.path.join(os.fspath(cache_dir), f"{model_name}.k{k}.neighbors.tsv")


def cache_store(path, model: EmbeddingModel, k: int, neighbor_sets) -> None:
    """Persist neighbor sets, keyed by model name, content digest and k.

    Written atomically (temp file then rename) so a crashed run never leaves
    a half-valid cache behind.
    """
    header = {
        "digest": model.content_digest(),
        "dim": model.dim,
        "k": k,
        "model": model.name,
    }
    sets = sorted(neighbor_sets, key=lambda ns: ns.query)
    directory = os.path.dirname(os.fspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(json.dumps(header, sort_keys=True) + "\n")
            for ns in sets:
                if ns.model_name != model.name or ns.k_requested != k:
                    raise ValueError(
                        f"neighbor set for {ns.query!r} does not belong to "
                        f"({model.name!r}, k={k})"
                    )
                for rank, (token, score) in enumerate(ns.entries, start=1):
                    fh.write(f"{ns.query}\t{rank}\t{token}\t{score:.9f}\n")
        os.replace(tmp, os.fspath(path))
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cache_load(path, model: EmbeddingModel, k: int) -> dict[str, NeighborSet]:
    """Load cached neighbor sets for (model, k); raises StaleCacheError on mismatch."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise CacheFormatError("empty cache file", line_no=1)
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise CacheFormatError(f"bad cache header: {exc}", line_no=1) from None
    expected = {
        "digest": model.content_digest(),
        "dim": model.dim,
        "k": k,
        "model": model.name,
    }
    if header != expected:
        raise StaleCacheError(
            f"cache at {os.fspath(path)} was built for {header}, need {expected}; "
            "rerun with --refresh to rebuild"
        )

    by_query: dict[str, list[tuple[str, float]]] = {}
    for line_no, line in enumerate(lines[1:], start=2):
        parts = line.split("\t")
        if len(parts) != 4:
            raise CacheFormatError("expected 4 tab-separated fields", line_no=line_no)
        query, rank_s, token, score_s = parts
        entries = by_query.setdefault(query, [])
        try:
            rank = int(rank_s)
            score = float(score_s)
        except ValueError:
            raise CacheFormatError("unparseable rank or score", line_no=line_no) from None
        if rank != len(entries) + 1:
            raise CacheFormatError(
                f"rank {rank} out of order for query {query!r}", line_no=line_no
            )
        entries.append((token, score))
    return {
        q: NeighborSet(q, k, model.name, tuple(entries))
        for q, entries in by_query.items()
    }
