"""Loading, writing and querying word-embedding models in word-vector text format.

The format is the plain-text one used by common embedding trainers: a header
line ``<count> <dim>`` followed by one line per word holding the token and
``dim`` space-separated decimal numbers.  Models are immutable once loaded;
concurrent readers are safe.
"""

import hashlib
import io
import logging
import os
from dataclasses import dataclass, field
from typing import BinaryIO, Union

import numpy as np

from .errors import UnknownTokenError, VecFormatError

logger = logging.getLogger(__name__)

Source = Union[str, os.PathLike, bytes, BinaryIO]


@dataclass
class EmbeddingModel:
    """A vocabulary plus its dense vector matrix.

    ``matrix`` has one row per vocabulary token, in order.  ``zero_rows``
    flags tokens whose vector is all zeros (derived from the matrix at
    construction): they are legal in input files but cosine similarity is
    undefined for them, so neighbor queries skip them.  ``source_digest``
    is the SHA-256 of the bytes the model was loaded from and keys the
    on-disk neighbor cache.
    """

    name: str
    dim: int
    vocab: list[str]
    matrix: np.ndarray
    normalized: bool = False
    zero_rows: frozenset[int] = frozenset()
    source_digest: str | None = None
    index: dict[str, int] = field(init=False, repr=False)
    _unit_matrix: np.ndarray | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        if self.dim <= 0:
            raise ValueError(f"dim must be positive, got {self.dim}")
        self.matrix = np.ascontiguousarray(self.matrix, dtype=np.float64)
        if self.matrix.shape != (len(self.vocab), self.dim):
            raise ValueError(
                f"matrix shape {self.matrix.shape} does not match "
                f"{len(self.vocab)} tokens of dim {self.dim}"
            )
        if not np.all(np.isfinite(self.matrix)):
            raise ValueError("matrix contains non-finite components")
        self.index = {}
        for i, tok in enumerate(self.vocab):
            if not tok or tok.split() != [tok]:
                raise ValueError(f"token {tok!r} is empty or contains whitespace")
            if tok in self.index:
                raise ValueError(f"duplicate token {tok!r}")
            self.index[tok] = i
        if len(self.vocab):
            norms = np.linalg.norm(self.matrix, axis=1)
            # zero rows are a property of the matrix; never trust the caller
            # to have flagged them all
            self.zero_rows = frozenset(self.zero_rows) | frozenset(
                int(i) for i in np.flatnonzero(norms == 0.0)
            )
            if self.normalized:
                nonzero = np.setdiff1d(np.arange(len(self.vocab)), list(self.zero_rows))
                if nonzero.size and np.max(np.abs(norms[nonzero] - 1.0)) > 1e-6:
                    raise ValueError("normalized model has rows with norm far from 1")
        self.matrix.flags.writeable = False

    def __contains__(self, token: str) -> bool:
        return token in self.index

    def __len__(self) -> int:
        return len(self.vocab)

    def unit_matrix(self) -> np.ndarray:
        """Row-normalized matrix (zero rows stay zero), computed once and cached."""
        if self.normalized:
            return self.matrix
        if self._unit_matrix is None:
            self._unit_matrix, _ = _normalize_matrix(self.matrix)
            self._unit_matrix.flags.writeable = False
        return self._unit_matrix

    def content_digest(self) -> str:
        """Digest identifying the model content; falls back to the serialized form."""
        if self.source_digest is not None:
            return self.source_digest
        buf = io.BytesIO()
        save_vec(self, buf)
        return hashlib.sha256(buf.getvalue()).hexdigest()


def contains(model: EmbeddingModel, token: str) -> bool:
    """Exact, case-sensitive vocabulary membership."""
    return token in model.index


def vector(model: EmbeddingModel, token: str) -> np.ndarray:
    """The stored row for ``token``; raises UnknownTokenError if absent."""
    try:
        row = model.index[token]
    except KeyError:
        raise UnknownTokenError(f"token {token!r} not in model {model.name!r}") from None
    return model.matrix[row]


def _read_bytes(source: Source) -> bytes:
    if isinstance(source, bytes):
        return source
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            return fh.read()
    return source.read()


def load_vec(source: Source, name: str, keep_first: bool = False) -> EmbeddingModel:
    """Parse a word-vector text file into an EmbeddingModel.

    ``keep_first`` downgrades duplicate tokens from an error to a warning,
    keeping the first occurrence; the duplicate row is dropped so the header
    count is then allowed to exceed the stored row count.
    """
    raw = _read_bytes(source)
    digest = hashlib.sha256(raw).hexdigest()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise VecFormatError(f"not valid UTF-8: {exc}") from None
    if text.startswith("﻿"):
        raise VecFormatError("file starts with a BOM", line_no=1)

    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise VecFormatError("empty file", line_no=1)

    header = lines[0].split(" ")
    if len(header) != 2 or not header[0].isdigit() or not header[1].isdigit():
        raise VecFormatError(f"malformed header {lines[0]!r}", line_no=1)
    count, dim = int(header[0]), int(header[1])
    if dim <= 0:
        raise VecFormatError(f"dimension must be positive, got {dim}", line_no=1)

    if len(lines) - 1 != count:
        raise VecFormatError(
            f"header declares {count} rows but file has {len(lines) - 1}"
        )

    vocab: list[str] = []
    seen: dict[str, int] = {}
    rows = np.empty((count, dim), dtype=np.float64)
    dropped = 0
    for line_no, line in enumerate(lines[1:], start=2):
        parts = line.split(" ")
        if len(parts) != dim + 1:
            raise VecFormatError(
                f"expected token plus {dim} components, found {len(parts) - 1}",
                line_no=line_no,
            )
        token = parts[0]
        if not token:
            raise VecFormatError("empty token", line_no=line_no)
        if token in seen:
            if not keep_first:
                raise VecFormatError(f"duplicate token {token!r}", line_no=line_no)
            logger.warning(
                "%s: duplicate token %r on line %d; keeping first occurrence",
                name, token, line_no,
            )
            dropped += 1
            continue
        try:
            values = [float(p) for p in parts[1:]]
        except ValueError:
            raise VecFormatError("unparseable vector component", line_no=line_no) from None
        if not all(np.isfinite(values)):
            raise VecFormatError("non-finite vector component", line_no=line_no)
        seen[token] = len(vocab)
        rows[len(vocab)] = values
        vocab.append(token)

    if dropped:
        rows = rows[: len(vocab)]

    matrix = rows
    norms = np.linalg.norm(matrix, axis=1)
    zero_rows = frozenset(int(i) for i in np.flatnonzero(norms == 0.0))
    if zero_rows:
        logger.warning("%s: %d zero vector(s) in input", name, len(zero_rows))
    return EmbeddingModel(
        name=name,
        dim=dim,
        vocab=vocab,
        matrix=matrix,
        normalized=False,
        zero_rows=zero_rows,
        source_digest=digest,
    )


def save_vec(model: EmbeddingModel, dest: Union[str, os.PathLike, BinaryIO]) -> None:
    """Write a model in word-vector text format.

    Numbers are rendered with 6 significant digits; writing a loaded model
    again reproduces the body lines byte for byte once the file has been
    through one write/load cycle.
    """
    own = isinstance(dest, (str, os.PathLike))
    fh: BinaryIO = open(dest, "wb") if own else dest
    try:
        fh.write(f"{len(model.vocab)} {model.dim}\n".encode("utf-8"))
        for i, token in enumerate(model.vocab):
            comps = " ".join("%.6g" % v for v in model.matrix[i])
            fh.write(f"{token} {comps}\n".encode("utf-8"))
    finally:
        if own:
            fh.close()


def _normalize_matrix(matrix: np.ndarray) -> tuple[np.ndarray, frozenset[int]]:
    norms = np.linalg.norm(matrix, axis=1)
    zero = norms == 0.0
    safe = np.where(zero, 1.0, norms)
    unit = matrix / safe[:, None]
    return unit, frozenset(int(i) for i in np.flatnonzero(zero))
