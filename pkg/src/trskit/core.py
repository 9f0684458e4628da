"""Domain types, validation, and the text instance format.

An instance document is line oriented UTF-8 text.  Sections:

    dim <n>                  problem dimension (required, first non-comment line)
    Q <row> <col> <value>    upper-triangle entry of the symmetric matrix
    g <i> <value>            linear-term entry
    m <rows>                 number of linear constraint rows (before A/b lines)
    A <row> <col> <value>    constraint matrix entry
    b <i> <value>            constraint right-hand side entry
    hollow norm_lb <l>       annulus hollow: excluded region {||y|| < l}
    hollow ellipsoid         starts an ellipsoid block; inside the block,
                             `W <r> <c> <v>` (upper triangle), `b <i> <v>`,
                             and `c <v>` lines describe
                             {y : y'Wy + 2b'y + c <= 0}

Lines starting with `#` are comments.  Unspecified entries are zero.
Constraint rows encode Ay - b in the nonnegative orthant, i.e. Ay >= b.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NotPositiveDefinite, ParseError


@dataclass
class SymSparseMatrix:
    """Sparse symmetric matrix, upper triangle stored once.

    Entries are (row, col, value) triples with row <= col; the symmetric
    completion is implicit.  Treated as immutable after construction.
    """

    n: int
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=np.int64)
        self.cols = np.asarray(self.cols, dtype=np.int64)
        self.vals = np.asarray(self.vals, dtype=np.float64)
        if not (self.rows.shape == self.cols.shape == self.vals.shape):
            raise DimensionMismatch("entry arrays must have equal length")
        if self.rows.size:
            if self.rows.min(initial=0) < 0 or self.cols.max(initial=-1) >= self.n:
                raise DimensionMismatch("entry index out of range")
            if np.any(self.rows > self.cols):
                raise DimensionMismatch("entries must satisfy row <= col")
            if not np.all(np.isfinite(self.vals)):
                raise DimensionMismatch("non-finite entry value")
            pairs = set(zip(self.rows.tolist(), self.cols.tolist()))
            if len(pairs) != self.rows.size:
                raise DimensionMismatch("duplicate (row, col) entry")

    @property
    def nnz(self):
        return int(self.rows.size)

    def to_dense(self):
        M = np.zeros((self.n, self.n))
        M[self.rows, self.cols] = self.vals
        off = self.rows != self.cols
        M[self.cols[off], self.rows[off]] = self.vals[off]
        return M

    @classmethod
    def from_dense(cls, M, drop_tol=0.0):
        M = np.asarray(M, dtype=np.float64)
        n = M.shape[0]
        iu = np.triu_indices(n)
        keep = np.abs(M[iu]) > drop_tol
        return cls(n, iu[0][keep], iu[1][keep], M[iu][keep])


@dataclass
class LinearConstraintBlock:
    """Linear side constraints Ay - b in the nonnegative orthant (Ay >= b).

    Feasibility of the stored instance is not assumed; emptiness is detected
    at solve time.
    """

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.A = np.atleast_2d(np.asarray(self.A, dtype=np.float64))
        self.b = np.asarray(self.b, dtype=np.float64).ravel()
        if self.A.shape[0] != self.b.shape[0]:
            raise DimensionMismatch(
                f"A has {self.A.shape[0]} rows but b has {self.b.shape[0]} entries"
            )

    @property
    def m(self):
        return self.A.shape[0]


@dataclass
class Ellipsoid:
    """The set {y : y'Wy + 2b'y + c <= 0} with W symmetric positive definite."""

    W: np.ndarray
    b: np.ndarray
    c: float

    def __post_init__(self):
        self.W = np.asarray(self.W, dtype=np.float64)
        self.b = np.asarray(self.b, dtype=np.float64).ravel()
        self.c = float(self.c)
        if self.W.shape[0] != self.W.shape[1] or self.W.shape[0] != self.b.shape[0]:
            raise DimensionMismatch("ellipsoid W/b dimensions inconsistent")
        # positive definiteness gate; import here to avoid a module cycle
        from .linalg import cholesky

        cholesky(self.W)

    def contains(self, y, tol=0.0):
        y = np.asarray(y, dtype=np.float64)
        return float(y @ self.W @ y + 2.0 * self.b @ y + self.c) <= tol


HOLLOW_NONE = "none"
HOLLOW_NORM_LB = "norm_lb"
HOLLOW_ELLIPSOIDS = "ellipsoids"


@dataclass
class HollowSpec:
    """Excluded region inside the ball: nothing, an annulus lower bound, or a
    union of ellipsoids."""

    variant: str = HOLLOW_NONE
    norm_lb: float = 0.0
    ellipsoids: list = field(default_factory=list)

    def __post_init__(self):
        if self.variant not in (HOLLOW_NONE, HOLLOW_NORM_LB, HOLLOW_ELLIPSOIDS):
            raise ValueError(f"unknown hollow variant {self.variant!r}")

    @classmethod
    def none(cls):
        return cls(HOLLOW_NONE)

    @classmethod
    def norm_lower_bound(cls, l):
        return cls(HOLLOW_NORM_LB, norm_lb=float(l))

    @classmethod
    def ellipsoid_union(cls, ellipsoids):
        return cls(HOLLOW_ELLIPSOIDS, ellipsoids=list(ellipsoids))

    def excludes(self, y, tol=0.0):
        """True when y lies in the hollow (excluded) set."""
        if self.variant == HOLLOW_NORM_LB:
            return float(np.linalg.norm(y)) < self.norm_lb - tol
        if self.variant == HOLLOW_ELLIPSOIDS:
            return any(e.contains(y, tol=-tol) for e in self.ellipsoids)
        return False


@dataclass
class TrsInstance:
    """One trust-region subproblem: minimize y'Qy + 2g'y over the unit ball,
    optionally with Ay >= b and a hollow exclusion.

    The library's contract requires lambda_min(Q) < 0; a violation is reported
    at solve time, not at construction.
    """

    Q: SymSparseMatrix
    g: np.ndarray
    constraints: LinearConstraintBlock | None = None
    hollow: HollowSpec = field(default_factory=HollowSpec.none)

    def __post_init__(self):
        self.g = np.asarray(self.g, dtype=np.float64).ravel()
        n = self.Q.n
        if self.g.shape[0] != n:
            raise DimensionMismatch(f"g has {self.g.shape[0]} entries, expected {n}")
        if self.constraints is not None and self.constraints.A.shape[1] != n:
            raise DimensionMismatch(
                f"A has {self.constraints.A.shape[1]} columns, expected {n}"
            )
        if self.hollow.variant == HOLLOW_ELLIPSOIDS:
            for e in self.hollow.ellipsoids:
                if e.W.shape[0] != n:
                    raise DimensionMismatch("ellipsoid dimension != instance dimension")

    @property
    def n(self):
        return self.Q.n


@dataclass
class TrsSolution:
    """Solver output: the point, both objective values, and the tightness
    certificate."""

    y: np.ndarray
    h_value: float
    f_value: float
    norm_y: float
    tight: bool
    iterations: int
    eigen_estimate: object = None
    gap_certificate: float = math.inf
    diagnostics: dict = field(default_factory=dict)


def parse_instance(text):
    """Parse an instance document into a validated TrsInstance.

    Raises ParseError on malformed lines and DimensionMismatch on
    inconsistent dimensions.
    """
    n = None
    m = None
    q_entries = []
    g_entries = {}
    a_entries = []
    b_entries = {}
    hollow_norm_lb = None
    ellipsoid_blocks = []
    current_ellipsoid = None  # dict with W/b/c accumulators while in a block

    def need_dim(lineno):
        if n is None:
            raise ParseError(lineno, "dim must appear before matrix entries")

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        kind = tok[0]
        try:
            if kind == "dim":
                if n is not None:
                    raise ParseError(lineno, "duplicate dim line")
                n = int(tok[1])
                if n <= 0:
                    raise ParseError(lineno, "dim must be positive")
            elif kind == "m":
                need_dim(lineno)
                m = int(tok[1])
                if m < 0:
                    raise ParseError(lineno, "m must be nonnegative")
            elif kind == "hollow":
                need_dim(lineno)
                if tok[1] == "norm_lb":
                    hollow_norm_lb = float(tok[2])
                    current_ellipsoid = None
                elif tok[1] == "ellipsoid":
                    current_ellipsoid = {"W": [], "b": {}, "c": 0.0}
                    ellipsoid_blocks.append(current_ellipsoid)
                else:
                    raise ParseError(lineno, f"unknown hollow variant {tok[1]!r}")
            elif kind == "Q":
                need_dim(lineno)
                q_entries.append((int(tok[1]), int(tok[2]), float(tok[3])))
            elif kind == "g":
                need_dim(lineno)
                g_entries[int(tok[1])] = float(tok[2])
            elif kind == "A":
                need_dim(lineno)
                a_entries.append((int(tok[1]), int(tok[2]), float(tok[3])))
            elif kind == "W":
                if current_ellipsoid is None:
                    raise ParseError(lineno, "W line outside an ellipsoid block")
                current_ellipsoid["W"].append((int(tok[1]), int(tok[2]), float(tok[3])))
            elif kind == "b":
                if current_ellipsoid is not None:
                    current_ellipsoid["b"][int(tok[1])] = float(tok[2])
                else:
                    need_dim(lineno)
                    b_entries[int(tok[1])] = float(tok[2])
            elif kind == "c":
                if current_ellipsoid is None:
                    raise ParseError(lineno, "c line outside an ellipsoid block")
                current_ellipsoid["c"] = float(tok[1])
            else:
                raise ParseError(lineno, f"unknown directive {kind!r}")
        except ParseError:
            raise
        except (IndexError, ValueError) as exc:
            raise ParseError(lineno, f"malformed {kind!r} line: {exc}") from None
        for t in tok[1:]:
            if t.lower() in ("nan", "inf", "-inf", "+inf"):
                raise ParseError(lineno, "non-finite number")

    if n is None:
        raise ParseError(0, "missing dim line")

    rows = np.array([e[0] for e in q_entries], dtype=np.int64)
    cols = np.array([e[1] for e in q_entries], dtype=np.int64)
    vals = np.array([e[2] for e in q_entries], dtype=np.float64)
    Q = SymSparseMatrix(n, rows, cols, vals)

    g = np.zeros(n)
    for i, v in g_entries.items():
        if not 0 <= i < n:
            raise DimensionMismatch(f"g index {i} out of range for dim {n}")
        g[i] = v

    constraints = None
    if a_entries or b_entries or m is not None:
        if m is None:
            m = 1 + max(
                [r for r, _, _ in a_entries] + [i for i in b_entries], default=-1
            )
        A = np.zeros((m, n))
        for r, c, v in a_entries:
            if not (0 <= r < m):
                raise DimensionMismatch(f"A row {r} out of range for m={m}")
            if not (0 <= c < n):
                raise DimensionMismatch(f"A column {c} out of range for dim {n}")
            A[r, c] = v
        b = np.zeros(m)
        for i, v in b_entries.items():
            if not 0 <= i < m:
                raise DimensionMismatch(f"b index {i} out of range for m={m}")
            b[i] = v
        constraints = LinearConstraintBlock(A, b)

    if hollow_norm_lb is not None and ellipsoid_blocks:
        raise ParseError(0, "norm_lb and ellipsoid hollows cannot be combined")
    if hollow_norm_lb is not None:
        hollow = HollowSpec.norm_lower_bound(hollow_norm_lb)
    elif ellipsoid_blocks:
        ellipsoids = []
        for blk in ellipsoid_blocks:
            W = np.zeros((n, n))
            for r, c, v in blk["W"]:
                if not (0 <= r < n and 0 <= c < n):
                    raise DimensionMismatch("ellipsoid W index out of range")
                W[r, c] = v
                W[c, r] = v
            eb = np.zeros(n)
            for i, v in blk["b"].items():
                if not 0 <= i < n:
                    raise DimensionMismatch("ellipsoid b index out of range")
                eb[i] = v
            try:
                ellipsoids.append(Ellipsoid(W, eb, blk["c"]))
            except NotPositiveDefinite as exc:
                raise ParseError(0, f"ellipsoid W not positive definite: {exc}")
        hollow = HollowSpec.ellipsoid_union(ellipsoids)
    else:
        hollow = HollowSpec.none()

    return TrsInstance(Q, g, constraints, hollow)


def serialize_instance(inst):
    """Render a TrsInstance back to the text format (round-trips exactly)."""
    out = [f"dim {inst.n}"]
    for r, c, v in zip(inst.Q.rows, inst.Q.cols, inst.Q.vals):
        out.append(f"Q {r} {c} {float(v)!r}")
    for i, v in enumerate(inst.g):
        if v != 0.0:
            out.append(f"g {i} {float(v)!r}")
    if inst.constraints is not None:
        blk = inst.constraints
        out.append(f"m {blk.m}")
        for r in range(blk.m):
            for c in range(inst.n):
                if blk.A[r, c] != 0.0:
                    out.append(f"A {r} {c} {float(blk.A[r, c])!r}")
        for i, v in enumerate(blk.b):
            if v != 0.0:
                out.append(f"b {i} {float(v)!r}")
    if inst.hollow.variant == HOLLOW_NORM_LB:
        out.append(f"hollow norm_lb {float(inst.hollow.norm_lb)!r}")
    elif inst.hollow.variant == HOLLOW_ELLIPSOIDS:
        for e in inst.hollow.ellipsoids:
            out.append("hollow ellipsoid")
            for r in range(inst.n):
                for c in range(r, inst.n):
                    if e.W[r, c] != 0.0:
                        out.append(f"W {r} {c} {float(e.W[r, c])!r}")
            for i, v in enumerate(e.b):
                if v != 0.0:
                    out.append(f"b {i} {float(v)!r}")
            out.append(f"c {float(e.c)!r}")
    return "\n".join(out) + "\n"


def validate(inst, dense_cap=500):
    """Structural diagnostics for an instance.  Returns a list of warning
    strings; an empty list means nothing suspicious was found."""
    diags = []
    if inst.n <= dense_cap:
        lam_min = float(np.linalg.eigvalsh(inst.Q.to_dense())[0])
        if lam_min >= 0.0:
            diags.append(
                "lambda_min(Q) >= 0: the nonconvexity assumption lambda_min(Q) < 0 "
                "is violated; the objective is already convex"
            )
    if inst.hollow.variant == HOLLOW_NORM_LB:
        l = inst.hollow.norm_lb
        if l < 0.0:
            diags.append("hollow norm lower bound l < 0 is vacuous")
        if l > 1.0:
            diags.append(
                "hollow norm lower bound l > 1 violates the interval-bounded "
                "hypothesis l <= ||y|| <= 1"
            )
    if inst.hollow.variant == HOLLOW_ELLIPSOIDS and not inst.hollow.ellipsoids:
        diags.append("hollow ellipsoid list is empty")
    if inst.constraints is not None and inst.constraints.m == 0:
        diags.append("constraint block has zero rows")
    return diags
