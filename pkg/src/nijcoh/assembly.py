"""Sparse matrices of the elementary cochain operations.

A cochain ``f: A^{(x)n} -> M`` is flattened in C order of its value tensor of
shape ``(dA,)*n + (dM,)``, i.e. lexicographically on (input tuple, output
basis index).  Each builder below returns the matrix of a linear operation on
that coordinate vector.
"""

from __future__ import annotations

import itertools
import os
from typing import Sequence

import numpy as np

from .exact_linalg import Matrix, block, identity_matrix, kron

DEFAULT_SIZE_LIMIT = 2_000_000


class ResourceLimitError(RuntimeError):
    pass


def size_limit() -> int:
    raw = os.environ.get("NIJCOH_MEM_LIMIT")
    if raw is None or raw.strip() == "":
        return DEFAULT_SIZE_LIMIT
    try:
        return int(raw)
    except ValueError:
        raise ResourceLimitError(f"NIJCOH_MEM_LIMIT must be an integer, got {raw!r}") from None


def guard(dim: int, what: str) -> None:
    limit = size_limit()
    if dim > limit:
        raise ResourceLimitError(f"{what} has dimension {dim}, above the limit {limit} (NIJCOH_MEM_LIMIT)")


def dense_to_matrix(arr: np.ndarray) -> Matrix:
    rows, cols = arr.shape
    return Matrix.from_entries(rows, cols, {(r, c): v for (r, c), v in np.ndenumerate(arr) if v != 0})


def matrix_to_dense(m: Matrix) -> np.ndarray:
    return np.array(m.to_dense(), dtype=object).reshape(m.rows, m.cols)


def eye(n: int) -> Matrix:
    return identity_matrix(n)


def transpose_of(arr: np.ndarray) -> Matrix:
    return dense_to_matrix(np.asarray(arr, dtype=object).T)


def post(Q: np.ndarray, n: int, dA: int) -> Matrix:
    """f -> Q o f."""
    return kron(eye(dA**n), dense_to_matrix(Q))


def pre_tensor(maps: Sequence[np.ndarray], dM: int) -> Matrix:
    """g -> g o (Q_1 (x) ... (x) Q_n); each Q_i maps slot i of the new domain into the old one."""
    if not maps:
        return eye(dM)
    return kron(*[transpose_of(Q) for Q in maps], eye(dM))


def pre_at(Q: np.ndarray, pos: int, n: int, dA: int, dM: int) -> Matrix:
    """f -> f(.., Q x_pos, ..) for an endomorphism Q of A."""
    return kron(eye(dA**pos), transpose_of(Q), eye(dA ** (n - 1 - pos) * dM))


def insert_product(mul: np.ndarray, pos: int, n: int, dM: int) -> Matrix:
    """Arity n -> n+1: f -> f(.., x_pos x_{pos+1}, ..)."""
    d = mul.shape[0]
    C = dense_to_matrix(mul.reshape(d * d, d))
    return kron(eye(d**pos), C, eye(d ** (n - 1 - pos) * dM))


def left_action(left: np.ndarray, n: int) -> Matrix:
    """Arity n -> n+1: f -> x_1 f(x_2, ..)."""
    dA, dM = left.shape[0], left.shape[1]
    D = dA**n
    blocks = [[kron(eye(D), dense_to_matrix(left[i].T))] for i in range(dA)]
    return block(blocks, [D * dM] * dA, [D * dM])


def right_action(right: np.ndarray, n: int) -> Matrix:
    """Arity n -> n+1: f -> f(.., x_n) x_{n+1}."""
    dM, dA = right.shape[0], right.shape[1]
    R = dense_to_matrix(np.transpose(right, (1, 2, 0)).reshape(dA * dM, dM))
    return kron(eye(dA**n), R)


def hochschild(mul: np.ndarray, left: np.ndarray, right: np.ndarray, n: int) -> Matrix:
    """Bar differential C^n(A, M) -> C^{n+1}(A, M)."""
    dM = left.shape[1]
    out = left_action(left, n)
    for i in range(n):
        term = insert_product(mul, i, n, dM)
        out = out - term if i % 2 == 0 else out + term
    last = right_action(right, n)
    return out + last if (n + 1) % 2 == 0 else out - last


def phi_sum(PA: np.ndarray, PM: np.ndarray, n: int) -> Matrix:
    """Sum over subsets S of positions: (-1)^{n-|S|} P_M^{n-|S|} o f(P at S)."""
    dA, dM = PA.shape[0], PM.shape[0]
    if n == 0:
        return eye(dM)
    PT = transpose_of(PA)
    out = Matrix.zero(dA**n * dM, dA**n * dM)
    powers = [np.eye(dM, dtype=object)]
    for _ in range(n):
        powers.append(PM.dot(powers[-1]))
    for S in itertools.product((False, True), repeat=n):
        k = sum(S)
        factors = [PT if s else eye(dA) for s in S] + [dense_to_matrix(powers[n - k])]
        term = kron(*factors)
        out = out + term if (n - k) % 2 == 0 else out - term
    return out
