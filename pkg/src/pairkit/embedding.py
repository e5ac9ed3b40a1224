"""Ingredient vectors: file loading, PPMI+SVD training, cosine similarity.

Vectors either come from a pretrained word2vec-style text file or are
derived deterministically from the corpus itself by factorizing the
shifted positive-PMI co-occurrence matrix (skip-gram embeddings
implicitly factorize a shifted PMI matrix, so this is a reproducible
stand-in). A seeded random table implements the random-input ablation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Iterable

import numpy as np

from .corpus import CountTable
from .pairscore import pmi


@dataclass
class EmbeddingTable:
    dim: int
    vectors: dict[str, np.ndarray]

    def __contains__(self, token: str) -> bool:
        return token in self.vectors

    def __getitem__(self, token: str) -> np.ndarray:
        return self.vectors[token]

    def tokens(self) -> list[str]:
        return sorted(self.vectors)


def load_embeddings(source: IO[str], vocabulary: Iterable[str] | None = None) -> EmbeddingTable:
    """Load a word2vec-style text file: header ``<n> <dim>``, then one
    token and ``dim`` floats per line.

    With a vocabulary, only those tokens are kept and every one of them
    must be present; the error lists all missing tokens. With
    ``vocabulary=None`` the whole file is loaded.
    """
    header = source.readline().split()
    if len(header) != 2:
        raise ValueError("line 1: expected header '<n_tokens> <dim>'")
    n_tokens, dim = int(header[0]), int(header[1])
    wanted = set(vocabulary) if vocabulary is not None else None
    vectors: dict[str, np.ndarray] = {}
    for lineno, line in enumerate(source, 2):
        parts = line.split()
        if not parts:
            continue
        token, values = parts[0], parts[1:]
        if len(values) != dim:
            raise ValueError(
                f"line {lineno}: expected {dim} values for '{token}', got {len(values)}"
            )
        if wanted is None or token in wanted:
            vectors[token] = np.array([float(v) for v in values], dtype=np.float64)
    del n_tokens  # header count is informational; vocabulary coverage is what matters
    if wanted is not None:
        missing = sorted(wanted - vectors.keys())
        if missing:
            raise ValueError(f"embedding file is missing tokens: {', '.join(missing)}")
    return EmbeddingTable(dim=dim, vectors=vectors)


def save_embeddings(table: EmbeddingTable, sink: IO[str]) -> None:
    """Write the text format with 6-decimal floats, tokens sorted."""
    tokens = table.tokens()
    sink.write(f"{len(tokens)} {table.dim}\n")
    for token in tokens:
        vals = " ".join(f"{v:.6f}" for v in table.vectors[token])
        sink.write(f"{token} {vals}\n")


def ppmi_matrix(table: CountTable, shift: float = 1.0) -> tuple[list[str], np.ndarray]:
    """Shifted positive-PMI matrix over the filtered vocabulary.

    M[x][y] = max(0, pmi(x, y) - log(shift)) for surviving pairs, 0
    elsewhere and on the diagonal. Symmetric with non-negative entries.
    """
    tokens = table.vocabulary()
    index = {t: i for i, t in enumerate(tokens)}
    m = np.zeros((len(tokens), len(tokens)), dtype=np.float64)
    log_shift = math.log(shift)
    for (a, b), cooc in table.cooccurrence.items():
        val = pmi(cooc, table.occurrence[a], table.occurrence[b], table.recipe_count)
        val = max(0.0, val - log_shift)
        i, j = index[a], index[b]
        m[i, j] = val
        m[j, i] = val
    return tokens, m


def factorize(m: np.ndarray, dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Rank-``dim`` symmetric factorization M ~ U diag(S) U^T.

    Keeps the ``dim`` largest-magnitude eigenvalues. Eigenvector signs
    are pinned (largest-magnitude component positive) so results are
    identical across runs. At dim = full rank, U diag(S) U^T recovers M
    up to floating-point error.
    """
    eigvals, eigvecs = np.linalg.eigh(m)
    order = np.argsort(-np.abs(eigvals), kind="stable")[:dim]
    s = eigvals[order]
    u = eigvecs[:, order]
    for col in range(u.shape[1]):
        pivot = np.argmax(np.abs(u[:, col]))
        if u[pivot, col] < 0:
            u[:, col] = -u[:, col]
    return u, s


def train_ppmi_svd(
    table: CountTable,
    dim: int,
    shift: float = 1.0,
    seed: int = 0,
) -> EmbeddingTable:
    """Embeddings U * |S|^(1/2) from the shifted-PPMI factorization.

    Deterministic: the direct symmetric eigensolver needs no random
    start, so ``seed`` has no effect on the result; it is accepted so
    callers can treat all embedding sources uniformly.
    """
    del seed
    tokens = table.vocabulary()
    if len(tokens) < 2:
        raise ValueError("vocabulary must contain at least 2 tokens")
    if not 1 <= dim <= len(tokens):
        raise ValueError(f"dim must be in [1, {len(tokens)}], got {dim}")
    _, m = ppmi_matrix(table, shift=shift)
    u, s = factorize(m, dim)
    emb = u * np.sqrt(np.abs(s))
    return EmbeddingTable(dim=dim, vectors={t: emb[i].copy() for i, t in enumerate(tokens)})


def random_table(vocabulary: Iterable[str], dim: int, seed: int) -> EmbeddingTable:
    """Seeded uniform [-0.05, 0.05] vectors (the random-input ablation)."""
    tokens = sorted(vocabulary)
    rng = np.random.default_rng(seed)
    mat = rng.uniform(-0.05, 0.05, size=(len(tokens), dim))
    return EmbeddingTable(dim=dim, vectors={t: mat[i] for i, t in enumerate(tokens)})


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """dot(u, v) / (|u| |v|), clamped to [-1, 1]. Zero vectors are errors."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape or u.ndim != 1:
        raise ValueError("cosine requires two equal-length vectors")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine is undefined for zero vectors")
    val = float(np.dot(u, v) / (nu * nv))
    return min(1.0, max(-1.0, val))
