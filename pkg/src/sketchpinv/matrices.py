"""
Matrix ingestion and seeded test-matrix generators.

Readers densify their input. Supported formats are Matrix Market
(``coordinate`` or ``array``, ``real``/``integer``, ``general``/``symmetric``)
and LIBSVM text rows (``label idx:value ...``, 1-based indices, labels are
discarded).

Generators draw from ``numpy.random.default_rng(seed)`` (PCG64), so a seed
reproduces the same matrix for a given numpy version.
"""
from dataclasses import dataclass

import numpy as np

MAX_DENSE_ENTRIES = 40_000_000


class MatrixParseError(ValueError):
    def __init__(self, msg, path=None, line=None):
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}"
        super().__init__(f"{where}: {msg}" if where else msg)
        self.line = line


def _check_size(m, n, path=None):
    if m < 0 or n < 0:
        raise MatrixParseError("negative dimension", path)
    if m * n > MAX_DENSE_ENTRIES:
        raise MatrixParseError(
            f"matrix {m}x{n} exceeds the dense cap of {MAX_DENSE_ENTRIES} entries", path)


def _data_lines(fh, start):
    for lineno, line in enumerate(fh, start=start):
        s = line.strip()
        if s and not s.startswith("%"):
            yield lineno, s


def read_matrix_market(path):
    """Read a real Matrix Market file into a dense array."""
    with open(path) as fh:
        header = fh.readline()
        tokens = header.split()
        if len(tokens) != 5 or tokens[0].lower() != "%%matrixmarket" or tokens[1].lower() != "matrix":
            raise MatrixParseError("malformed header", path, 1)
        fmt, field, symm = (t.lower() for t in tokens[2:])
        if fmt not in ("coordinate", "array"):
            raise MatrixParseError(f"unsupported format: {fmt}", path, 1)
        if field not in ("real", "integer", "double"):
            raise MatrixParseError(f"unsupported field: {field}", path, 1)
        if symm not in ("general", "symmetric"):
            raise MatrixParseError(f"unsupported symmetry: {symm}", path, 1)

        lines = _data_lines(fh, 2)
        try:
            lineno, size = next(lines)
        except StopIteration:
            raise MatrixParseError("missing size line", path) from None
        try:
            dims = [int(t) for t in size.split()]
        except ValueError:
            raise MatrixParseError("malformed size line", path, lineno) from None

        if fmt == "coordinate":
            if len(dims) != 3:
                raise MatrixParseError("size line needs rows cols nnz", path, lineno)
            m, n, nnz = dims
            _check_size(m, n, path)
            A = np.zeros((m, n))
            count = 0
            for lineno, s in lines:
                parts = s.split()
                if len(parts) != 3:
                    raise MatrixParseError("expected 'row col value'", path, lineno)
                try:
                    i, j, v = int(parts[0]) - 1, int(parts[1]) - 1, float(parts[2])
                except ValueError:
                    raise MatrixParseError("malformed entry", path, lineno) from None
                if not (0 <= i < m and 0 <= j < n):
                    raise MatrixParseError(f"index ({i + 1}, {j + 1}) out of range", path, lineno)
                if symm == "symmetric" and j > i:
                    raise MatrixParseError("symmetric file stores an upper-triangle entry", path, lineno)
                A[i, j] += v
                if symm == "symmetric" and i != j:
                    A[j, i] += v
                count += 1
            if count != nnz:
                raise MatrixParseError(f"expected {nnz} entries, found {count}", path)
            return A

        if len(dims) != 2:
            raise MatrixParseError("size line needs rows cols", path, lineno)
        m, n = dims
        _check_size(m, n, path)
        if symm == "symmetric" and m != n:
            raise MatrixParseError("symmetric array must be square", path, lineno)
        values = []
        for lineno, s in lines:
            try:
                values.append(float(s))
            except ValueError:
                raise MatrixParseError("malformed value", path, lineno) from None
        if symm == "general":
            if len(values) != m * n:
                raise MatrixParseError(f"expected {m * n} values, found {len(values)}", path)
            return np.array(values).reshape(m, n, order="F")
        if len(values) != n * (n + 1) // 2:
            raise MatrixParseError(f"expected {n * (n + 1) // 2} values, found {len(values)}", path)
        A = np.zeros((n, n))
        it = iter(values)
        for j in range(n):
            for i in range(j, n):
                A[i, j] = A[j, i] = next(it)
        return A


def write_matrix_market(path, A):
    """Write ``A`` in ``array real general`` form with round-trip precision."""
    A = np.asarray(A, dtype=np.float64)
    m, n = A.shape
    with open(path, "w") as fh:
        fh.write("%%MatrixMarket matrix array real general\n")
        fh.write(f"{m} {n}\n")
        for v in A.ravel(order="F"):
            fh.write(f"{float(v)!r}\n")


def read_libsvm(path):
    """Design matrix of a LIBSVM text file; labels are dropped."""
    rows = []
    d = 0
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.split("#", 1)[0].strip()
            if not s:
                continue
            parts = s.split()
            row = {}
            for tok in parts[1:]:
                try:
                    k, v = tok.split(":")
                    k = int(k)
                    row[k - 1] = float(v)
                except ValueError:
                    raise MatrixParseError(f"malformed feature {tok!r}", path, lineno) from None
                if k < 1:
                    raise MatrixParseError(f"feature index {k} must be >= 1", path, lineno)
                d = max(d, k)
            rows.append(row)
    _check_size(len(rows), d, path)
    A = np.zeros((len(rows), d))
    for i, row in enumerate(rows):
        for j, v in row.items():
            A[i, j] = v
    return A


def read_matrix(path):
    """Dispatch on content: Matrix Market if the header says so, else LIBSVM."""
    with open(path) as fh:
        first = fh.readline()
    if first.lower().startswith("%%matrixmarket"):
        return read_matrix_market(path)
    return read_libsvm(path)


def gen_gram(path):
    """``A^T A`` for the design matrix stored at ``path``."""
    A = read_matrix(path)
    G = A.T @ A
    return 0.5 * (G + G.T)


def gen_gaussian_rank_r(m, n, r, seed=0):
    """Best rank-``r`` approximation of an ``m x n`` standard normal draw."""
    if not 1 <= r <= min(m, n):
        raise ValueError(f"rank {r} must lie in [1, {min(m, n)}]")
    _check_size(m, n)
    G = np.random.default_rng(seed).standard_normal((m, n))
    if r == min(m, n):
        return G
    U, s, Vt = np.linalg.svd(G, full_matrices=False)
    return (U[:, :r] * s[:r]) @ Vt[:r]


def gen_sym_rank_r(n, r, seed=0):
    """Rank-``r`` truncation of ``G + G^T`` keeping the largest ``|lambda|``."""
    if not 1 <= r <= n:
        raise ValueError(f"rank {r} must lie in [1, {n}]")
    _check_size(n, n)
    G = np.random.default_rng(seed).standard_normal((n, n))
    H = G + G.T
    if r == n:
        return H
    w, V = np.linalg.eigh(H)
    keep = np.argsort(-np.abs(w), kind="stable")[:r]
    X = (V[:, keep] * w[keep]) @ V[:, keep].T
    return 0.5 * (X + X.T)


@dataclass(frozen=True)
class GeneratorSpec:
    """
    A generated or ingested matrix.

    ``kind`` is ``"gaussian"`` (``m, n, r``), ``"sym"`` (``n, r``),
    ``"gram"`` (``path``), ``"diag"`` (``values``) or ``"file"`` (``path``).
    """

    kind: str
    m: int = 0
    n: int = 0
    r: int = 0
    seed: int = 0
    path: str = None
    values: tuple = ()

    @classmethod
    def parse(cls, text, seed=0):
        """Parse ``kind:key=value,...`` such as ``gaussian:m=500,n=20,r=15``."""
        kind, _, rest = text.partition(":")
        kind = kind.strip().lower()
        opts = {}
        if rest:
            for item in rest.split(","):
                key, eq, val = item.partition("=")
                if not eq:
                    raise ValueError(f"bad generator option {item!r}")
                opts[key.strip()] = val.strip()
        if "seed" in opts:
            seed = int(opts.pop("seed"))
        try:
            if kind == "gaussian":
                m, n = int(opts.pop("m")), int(opts.pop("n"))
                r = int(opts.pop("r", min(m, n)))
                spec = cls("gaussian", m=m, n=n, r=r, seed=seed)
            elif kind == "sym":
                n = int(opts.pop("n"))
                spec = cls("sym", m=n, n=n, r=int(opts.pop("r", n)), seed=seed)
            elif kind == "gram":
                spec = cls("gram", path=opts.pop("path"), seed=seed)
            elif kind == "diag":
                vals = tuple(float(v) for v in opts.pop("values").split(";"))
                spec = cls("diag", m=len(vals), n=len(vals), values=vals, seed=seed)
            else:
                raise ValueError(f"unknown generator {kind!r}")
        except KeyError as exc:
            raise ValueError(f"generator {kind!r} needs option {exc.args[0]!r}") from None
        if opts:
            raise ValueError(f"unknown generator options {sorted(opts)}")
        return spec

    def build(self):
        if self.kind == "gaussian":
            return gen_gaussian_rank_r(self.m, self.n, self.r, self.seed)
        if self.kind == "sym":
            return gen_sym_rank_r(self.n, self.r, self.seed)
        if self.kind == "gram":
            return gen_gram(self.path)
        if self.kind == "diag":
            return np.diag(np.asarray(self.values, dtype=np.float64))
        if self.kind == "file":
            return read_matrix(self.path)
        raise ValueError(f"unknown generator {self.kind!r}")
