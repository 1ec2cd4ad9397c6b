"""Seeded instance generators for the benchmark families, and a LIBSVM reader.

Families
--------
lasso
    ``||Ax - b||^2 + lam ||x||_1`` with ``A ~ U[0,1)^{m x n}``,
    ``b = A x_tilde + 0.01 eps``.
mcp
    Same data, MCP penalty with parameters ``(lam, c)``.
student-t
    Student's t loss over a subsampled DCT with an ``l1`` penalty.
logistic
    ``l1``-regularised logistic loss on a LIBSVM file.
"""

import math
import re
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .nonsmooth import L1, MCP
from .numerics import DctSubsample, DenseMatrix, Rng, SparseMatrix
from .problem import CompositeProblem
from .smooth import LeastSquares, Logistic, StudentT

__all__ = [
    "LassoSpec", "McpSpec", "StudentTSpec", "LogisticSpec", "LibsvmDataset",
    "LibsvmParseError", "gen_lasso", "gen_mcp", "gen_student_t",
    "gen_logistic", "parse_libsvm", "read_libsvm", "serialize_libsvm",
    "student_t_noise", "make_instance", "sample_libsvm_path", "LASSO_TABLE",
]

# (m, n, s) grid of the LASSO / MCP experiments
LASSO_TABLE = ((500, 550, 50), (1000, 1050, 50), (500, 150, 30), (1000, 300, 60),
               (3000, 500, 180), (5000, 1500, 300), (7000, 2000, 400))


@dataclass(frozen=True)
class LassoSpec:
    m: int
    n: int
    s: int
    lam: float = 0.1
    sparse: bool = False
    seed: int = 0

    family = "lasso"

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("m and n must be at least 1")
        if not 0 <= self.s <= self.n:
            raise ValueError("need 0 <= s <= n")
        if not self.lam > 0:
            raise ValueError("lam must be positive")

    @property
    def label(self):
        tag = ",sparse" if self.sparse else ""
        return f"{self.family}({self.m},{self.n},{self.s}{tag};lam={self.lam:g})"


@dataclass(frozen=True)
class McpSpec(LassoSpec):
    c: float = 10.0

    family = "mcp"

    def __post_init__(self):
        super().__post_init__()
        if not self.c > 0:
            raise ValueError("c must be positive")

    @property
    def label(self):
        tag = ",sparse" if self.sparse else ""
        return (f"{self.family}({self.m},{self.n},{self.s}{tag};"
                f"lam={self.lam:g},c={self.c:g})")


@dataclass(frozen=True)
class StudentTSpec:
    n: int
    d: float = 20.0
    lam: float = 0.01
    nu: float = 0.001
    seed: int = 0

    family = "student-t"

    def __post_init__(self):
        if self.n < 8 or self.n % 8:
            raise ValueError("n must be a positive multiple of 8")
        if not (self.lam > 0 and self.nu > 0):
            raise ValueError("lam and nu must be positive")

    @property
    def m(self):
        return self.n // 8

    @property
    def k(self):
        return self.n // 40

    @property
    def label(self):
        return f"{self.family}(n={self.n},d={self.d:g};lam={self.lam:g},nu={self.nu:g})"


@dataclass(frozen=True)
class LogisticSpec:
    path: str
    lam: float = 0.1
    n_features: int | None = None
    seed: int = 0

    family = "logistic"

    @property
    def label(self):
        name = re.sub(r"\.[^./]*$", "", self.path.replace("\\", "/").rsplit("/", 1)[-1])
        return f"{self.family}({name};lam={self.lam:g})"


def _lasso_data(spec):
    rng = Rng(spec.seed)
    A = rng.uniform((spec.m, spec.n))
    if spec.sparse:
        zero = rng.choice_prefix(spec.m * spec.n, (spec.m * spec.n) // 2)
        A.ravel()[zero] = 0.0
    x_true = np.zeros(spec.n)
    x_true[rng.choice_prefix(spec.n, spec.s)] = 1.0
    op = SparseMatrix.from_dense(A) if spec.sparse else DenseMatrix(A)
    b = op.matvec(x_true) + 0.01 * rng.normal(spec.m)
    return op, b, x_true


def gen_lasso(spec):
    """LASSO instance. Returns ``(problem, x_true)``."""
    A, b, x_true = _lasso_data(spec)
    return CompositeProblem(LeastSquares(A, b), L1(spec.lam)), x_true


def gen_mcp(spec):
    """MCP-regularised least squares on the LASSO data of the same seed.

    Returns ``(problem, x_true)``; ``problem.rho == 1/c``.
    """
    A, b, x_true = _lasso_data(spec)
    return CompositeProblem(LeastSquares(A, b), MCP(spec.lam, spec.c)), x_true


def student_t_noise(rng, size, dof=5):
    """Student's t draws as ``normal / sqrt(chi2_dof / dof)``."""
    z = rng.normal(size)
    chi2 = np.sum(rng.normal((dof, size)) ** 2, axis=0)
    return z / np.sqrt(chi2 / dof)


def gen_student_t(spec):
    """Sparse spike recovery from ``n/8`` DCT coefficients under t5 noise.

    The ``k = n // 40`` spikes have random sign and magnitude
    ``10**(d*u/20)`` with ``u ~ U[0,1)``.
    """
    rng = Rng(spec.seed)
    n, m, k = spec.n, spec.m, spec.k
    x_true = np.zeros(n)
    support = rng.choice_prefix(n, k)
    x_true[support] = rng.signs(k) * 10.0 ** (spec.d * rng.uniform(k) / 20.0)
    J = np.sort(rng.choice_prefix(n, m))
    A = DctSubsample(J, n)
    b = A.matvec(x_true) + 0.1 * student_t_noise(rng, m)
    return CompositeProblem(StudentT(A, b, spec.nu), L1(spec.lam)), x_true


def gen_logistic(spec):
    ds = read_libsvm(spec.path, spec.n_features)
    return CompositeProblem(Logistic(ds.features, ds.labels), L1(spec.lam)), None


def make_instance(spec):
    """``(problem, x0, x_true)`` for any family spec.

    Starting points: zero, except student-t which draws ``x0 ~ U[-10, 10]``
    from a separate stream of the same seed.
    """
    if isinstance(spec, McpSpec):
        problem, x_true = gen_mcp(spec)
    elif isinstance(spec, LassoSpec):
        problem, x_true = gen_lasso(spec)
    elif isinstance(spec, StudentTSpec):
        problem, x_true = gen_student_t(spec)
        x0 = Rng(spec.seed, stream=1).uniform(spec.n) * 20.0 - 10.0
        return problem, x0, x_true
    elif isinstance(spec, LogisticSpec):
        problem, x_true = gen_logistic(spec)
    else:
        raise TypeError(f"unknown spec type {type(spec).__name__}")
    return problem, np.zeros(problem.n), x_true


# --------------------------------------------------------------------------
# LIBSVM text format


class LibsvmParseError(ValueError):
    def __init__(self, line, msg):
        super().__init__(f"line {line}: {msg}")
        self.line = line


@dataclass(frozen=True)
class LibsvmDataset:
    labels: np.ndarray
    features: SparseMatrix

    @property
    def m(self):
        return self.features.rows

    @property
    def n(self):
        return self.features.cols

    def rows(self):
        """Yield ``(label, [(index_1based, value), ...])`` per sample."""
        F = self.features
        for i, lab in enumerate(self.labels):
            sl = slice(F.indptr[i], F.indptr[i + 1])
            yield int(lab), [(int(j) + 1, float(v))
                             for j, v in zip(F.indices[sl], F.values[sl])]


def _label(tok, lineno):
    try:
        v = float(tok)
    except ValueError:
        raise LibsvmParseError(lineno, f"bad label {tok!r}") from None
    if v == 1.0:
        return 1
    if v in (0.0, -1.0):
        return -1
    raise LibsvmParseError(lineno, f"label {tok!r} is not binary (+1/-1 or 1/0)")


def parse_libsvm(text, n_features=None):
    """Parse LIBSVM text into a :class:`LibsvmDataset`.

    One sample per line, ``<label> <idx>:<val> ...``, indices 1-based and
    strictly ascending. ``#`` starts a comment; blank lines are skipped.
    Labels ``1``/``+1`` map to +1, ``0``/``-1`` to -1. Explicit zero values
    are dropped. ``n_features`` overrides the column count (it must cover the
    largest index seen).

    Raises
    ------
    LibsvmParseError
        With the offending 1-based line number.
    """
    labels, indptr, indices, values = [], [0], [], []
    max_idx = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        labels.append(_label(tokens[0], lineno))
        prev = 0
        for tok in tokens[1:]:
            idx_s, sep, val_s = tok.partition(":")
            if not sep or not idx_s.isdigit():
                raise LibsvmParseError(lineno, f"malformed token {tok!r}")
            idx = int(idx_s)
            if idx < 1:
                raise LibsvmParseError(lineno, f"index must be >= 1 in {tok!r}")
            try:
                val = float(val_s)
            except ValueError:
                raise LibsvmParseError(lineno, f"non-numeric value in {tok!r}") from None
            if not math.isfinite(val):
                raise LibsvmParseError(lineno, f"non-finite value in {tok!r}")
            if idx == prev:
                raise LibsvmParseError(lineno, f"duplicate index {idx}")
            if idx < prev:
                raise LibsvmParseError(lineno, f"index {idx} after {prev} (descending)")
            prev = idx
            if val != 0.0:
                indices.append(idx - 1)
                values.append(val)
        max_idx = max(max_idx, prev)
        indptr.append(len(indices))
    if not labels:
        raise LibsvmParseError(0, "no samples")
    n = max_idx if n_features is None else int(n_features)
    if n < max_idx:
        raise LibsvmParseError(0, f"n_features={n} is smaller than max index {max_idx}")
    X = SparseMatrix(len(labels), n, indptr, indices, values)
    return LibsvmDataset(np.array(labels, dtype=float), X)


def read_libsvm(path, n_features=None):
    with open(path, encoding="utf-8") as fh:
        return parse_libsvm(fh.read(), n_features)


def serialize_libsvm(ds):
    lines = []
    for lab, feats in ds.rows():
        toks = ["+1" if lab > 0 else "-1"]
        toks += [f"{j}:{v!r}" for j, v in feats]
        lines.append(" ".join(toks))
    return "\n".join(lines) + "\n"


def sample_libsvm_path():
    """Path of the bundled 100-sample binary classification file."""
    return str(resources.files("proxcg") / "data" / "sample.libsvm")
