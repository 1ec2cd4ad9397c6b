"""Linear operators and the seeded random stream used by the generators.

Three operator flavours share one interface (``shape``, ``matvec``,
``rmatvec``): a dense row-major matrix, a CSR matrix, and an implicit
"subsampled DCT" operator that applies the orthonormal DCT-II and keeps the
rows listed in an index set.
"""

import numpy as np
import scipy.fft
import scipy.sparse

__all__ = [
    "LinearOperator",
    "DenseMatrix",
    "SparseMatrix",
    "DctSubsample",
    "Rng",
    "matvec",
    "matvec_t",
    "dct_matrix",
]


class LinearOperator:
    """Base class: a real linear map ``R^cols -> R^rows``."""

    shape = (0, 0)

    @property
    def rows(self):
        return self.shape[0]

    @property
    def cols(self):
        return self.shape[1]

    def matvec(self, x):
        x = self._check(x, self.cols, "matvec")
        return self._matvec(x)

    def rmatvec(self, y):
        y = self._check(y, self.rows, "rmatvec")
        return self._rmatvec(y)

    def todense(self):
        return np.column_stack([self._matvec(e) for e in np.eye(self.cols)]) \
            if self.cols else np.zeros((self.rows, 0))

    @staticmethod
    def _check(v, size, name):
        v = np.asarray(v, dtype=float)
        if v.ndim != 1 or v.shape[0] != size:
            raise ValueError(
                f"{name}: expected vector of length {size}, got shape {v.shape}")
        return v

    def _matvec(self, x):
        raise NotImplementedError

    def _rmatvec(self, y):
        raise NotImplementedError


class DenseMatrix(LinearOperator):
    """Dense matrix stored row-major.

    Parameters
    ----------
    entries : array_like
        Either a 2-D array, or a flat array together with ``rows``/``cols``.
    """

    def __init__(self, entries, rows=None, cols=None):
        a = np.asarray(entries, dtype=float)
        if rows is not None or cols is not None:
            if a.ndim != 1 or a.size != rows * cols:
                raise ValueError("entries length must equal rows*cols")
            a = a.reshape(rows, cols)
        if a.ndim != 2:
            raise ValueError("DenseMatrix needs a 2-D array")
        if not np.all(np.isfinite(a)):
            raise ValueError("DenseMatrix entries must be finite")
        self.array = np.ascontiguousarray(a)
        self.array.setflags(write=False)
        self.shape = a.shape

    @property
    def entries(self):
        return self.array.ravel()

    def _matvec(self, x):
        return self.array @ x

    def _rmatvec(self, y):
        return self.array.T @ y

    def todense(self):
        return np.array(self.array)


class SparseMatrix(LinearOperator):
    """Compressed-sparse-row matrix.

    The CSR arrays are validated here (monotone row pointers, ascending
    in-bounds column indices, finite nonzero values); products are delegated
    to :mod:`scipy.sparse`.
    """

    def __init__(self, rows, cols, indptr, indices, values):
        indptr = np.asarray(indptr, dtype=np.int64)
        indices = np.asarray(indices, dtype=np.int64)
        values = np.asarray(values, dtype=float)
        if indptr.shape != (rows + 1,) or indptr[0] != 0:
            raise ValueError("row pointer must have rows+1 entries starting at 0")
        if np.any(np.diff(indptr) < 0):
            raise ValueError("row pointer must be nondecreasing")
        if indptr[-1] != indices.size or indices.size != values.size:
            raise ValueError("last row pointer must equal nnz")
        if indices.size and (indices.min() < 0 or indices.max() >= cols):
            raise ValueError("column index out of range")
        for r in range(rows):
            seg = indices[indptr[r]:indptr[r + 1]]
            if np.any(np.diff(seg) <= 0):
                raise ValueError(f"column indices of row {r} not strictly ascending")
        if not np.all(np.isfinite(values)) or np.any(values == 0):
            raise ValueError("values must be finite and nonzero")
        self.shape = (int(rows), int(cols))
        self.indptr, self.indices, self.values = indptr, indices, values
        self._csr = scipy.sparse.csr_matrix((values, indices, indptr),
                                            shape=self.shape)
        self._csc = self._csr.T.tocsr()

    @classmethod
    def from_dense(cls, a):
        a = np.asarray(a, dtype=float)
        csr = scipy.sparse.csr_matrix(a)
        csr.eliminate_zeros()
        csr.sort_indices()
        return cls(a.shape[0], a.shape[1], csr.indptr, csr.indices, csr.data)

    @property
    def nnz(self):
        return int(self.indices.size)

    def _matvec(self, x):
        return self._csr @ x

    def _rmatvec(self, y):
        return self._csc @ y

    def todense(self):
        return self._csr.toarray()


class DctSubsample(LinearOperator):
    """Rows ``J`` of the orthonormal DCT-II of a length-``n`` signal.

    ``matvec(x) = dct(x, type=2, norm="ortho")[J]``; the adjoint zero-fills
    into length ``n`` and applies the inverse (orthonormal) transform.
    """

    def __init__(self, index_set, n):
        J = np.asarray(index_set, dtype=np.int64)
        if J.ndim != 1 or (J.size and (J.min() < 0 or J.max() >= n)):
            raise ValueError("index set must hold indices in [0, n)")
        if np.unique(J).size != J.size:
            raise ValueError("index set must not repeat indices")
        self.index_set = J
        self.n = int(n)
        self.shape = (J.size, self.n)

    def _matvec(self, x):
        return scipy.fft.dct(x, type=2, norm="ortho")[self.index_set]

    def _rmatvec(self, y):
        full = np.zeros(self.n)
        full[self.index_set] = y
        return scipy.fft.idct(full, type=2, norm="ortho")


def dct_matrix(n):
    """Explicit orthonormal DCT-II matrix, row ``k`` is the k-th basis vector."""
    k = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    D = np.cos(np.pi * k * (2 * j + 1) / (2 * n)) * np.sqrt(2.0 / n)
    D[0] /= np.sqrt(2.0)
    return D


def matvec(op, x):
    return op.matvec(x)


def matvec_t(op, y):
    return op.rmatvec(y)


class Rng:
    """Seeded random stream.

    Backed by numpy's counter-based Philox bit generator, keyed by a 64-bit
    seed and an optional stream number, so the same ``(seed, stream)`` always
    yields the same draws. No draw ever touches system entropy.
    """

    def __init__(self, seed, stream=0):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self.seed, self.stream = seed, int(stream)
        key = np.array([seed, self.stream], dtype=np.uint64)
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def uniform(self, size=None):
        """Draws from U[0, 1)."""
        return self._gen.random(size)

    def normal(self, size=None):
        return self._gen.standard_normal(size)

    def choice_prefix(self, n, k):
        """First ``k`` entries of a random permutation of ``range(n)``."""
        if not 0 <= k <= n:
            raise ValueError("need 0 <= k <= n")
        return self._gen.permutation(n)[:k]

    def signs(self, size):
        return np.where(self.uniform(size) < 0.5, -1.0, 1.0)
