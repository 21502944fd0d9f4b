"""Truncated sequence models of ``c ⊗ K`` and their projections.

An element of ``c ⊗ K`` is a convergent sequence ``x_1, x_2, ... -> x_inf``
of compact operators.  The model keeps ``N`` explicit fibers and treats
every later fiber as equal to the limit ``x_inf``.  Each operator lives on
the first ``d`` basis vectors ("compact coordinates").

Projections in the bidual need not be eventually constant, so their fibers
carry extra coordinates that model elements cannot see:

* far coordinates stand for the part of the Hilbert space beyond the first
  ``d`` basis vectors.  They are fixed directions, so they survive weak
  limits.
* fresh coordinates exist only in tail fibers.  A tail class stands for
  infinitely many fibers ``n > N`` that differ only in which far basis
  vector they use, so that component tends weakly to zero.

A tail class is given by an orthonormal basis ``V`` in the tail layout.
Its weak limit drops the fresh rows, and the closure of a projection joins
those limits into the fiber at infinity.  A vector state ``(x v, v)`` in
such a fiber converges to a functional whose norm is ``||P_c v||^2``.
Here ``P_c`` projects onto the compact coordinates.  Under a scalar
extension the norm gains ``(e' P_x v, P_x v)``, where ``P_x`` projects onto
the non-compact coordinates.  The infimum of these norms bounds
``alpha(p)^{-1}`` from above.

Under a scalar (Busby) extension the algebra is ``C e + A_0 ⊗ M_2``, and
``e`` acts on every fiber as ``e' ⊗ 1``.  Model layouts are block-major, one
block per copy of the fiber Hilbert space.  Each block is ordered
``[compact d | far | fresh]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .config import DEFAULT_TOL, Tolerances, budget_from_env
from .linalg import hermitian, range_basis

__all__ = [
    "ModelError",
    "WitnessRejected",
    "ModelInconsistency",
    "BusbyExtension",
    "SeqModel",
    "SeqElement",
    "SeqProjection",
    "AlphaEstimate",
    "RegularityResult",
    "closure",
    "is_closed",
    "is_compact_in_model",
    "join",
    "amplify",
    "approx_identity",
    "eps_sequence",
    "extrapolate_limit",
    "alpha_spectra",
    "alpha_witness",
    "alpha_majorized",
    "alpha_state_limit",
    "alpha_sandwich",
    "norm_ap",
    "quasi_regularity_constant",
    "zero_regular_check",
    "cone_regular_check",
    "k_regular_constant",
    "formula_4_9",
    "formula_4_11",
    "fiber_bases",
    "seq_norm_distance",
    "seq_angle",
    "describe",
]


class ModelError(ValueError):
    """Invalid model configuration or an operation outside the model's reach."""


class WitnessRejected(ValueError):
    """A candidate witness fails ``p <= pap`` on some fiber."""

    def __init__(self, fiber: str, margin: float):
        super().__init__(f"p <= pap fails on fiber {fiber} (min eigenvalue {margin:.6g} < 1)")
        self.fiber = fiber
        self.margin = margin


class ModelInconsistency(RuntimeError):
    """Lower and upper bounds for alpha contradict each other."""


@dataclass(frozen=True)
class BusbyExtension:
    """Scalar extension determined by a 2x2 projection ``e'``.

    The multiplier ``e' ⊗ 1`` acts on the doubled fiber ``H ⊕ H``.
    """

    e_prime: np.ndarray

    def __post_init__(self):
        E = hermitian(self.e_prime)
        if E.shape != (2, 2) or np.linalg.norm(E @ E - E) > 1e-12:
            raise ModelError("e_prime must be an exact 2x2 projection")
        object.__setattr__(self, "e_prime", E)

    @classmethod
    def from_t(cls, t: float) -> "BusbyExtension":
        """The rank-one ``e'`` with ``(e' e_1 ⊕ 0, e_1 ⊕ 0) = 1/t``."""
        if not t > 1:
            raise ModelError("the extension parameter t must exceed 1")
        a = 1.0 / t
        b = np.sqrt(a * (1.0 - a))
        return cls(np.array([[a, b], [b, 1.0 - a]]))


@dataclass(frozen=True)
class SeqModel:
    """Truncation parameters and coordinate layout.

    Attributes
    ----------
    fiber_dim : int
        ``d``, number of compact coordinates per block.
    trunc_len : int
        ``N``, number of explicit fibers.
    tail_kind : {"norm", "diagonal"}
        ``"diagonal"`` restricts element tails to diagonal matrices.
    extension : BusbyExtension or None
        Scalar extension; forces ``blocks == 2``.
    n_far : int
        Far coordinates per block; 0 for matrix-algebra fibers ``c ⊗ M_k``.
    n_fresh : int
        Fresh escape coordinates per block in tail fibers.
    blocks : int
        Copies of the fiber Hilbert space (2 for ``A_0 ⊗ M_2``, ``k`` after
        amplification).
    """

    fiber_dim: int
    trunc_len: int
    tail_kind: str = "norm"
    extension: BusbyExtension | None = None
    n_far: int = 1
    n_fresh: int = 2
    blocks: int = 1

    def __post_init__(self):
        if self.fiber_dim < 1 or self.trunc_len < 1:
            raise ModelError("fiber_dim and trunc_len must be positive")
        if self.tail_kind not in ("norm", "diagonal"):
            raise ModelError(f"unknown tail_kind {self.tail_kind!r}")
        if self.extension is not None and self.blocks != 2:
            raise ModelError("a scalar extension needs the doubled fiber (blocks=2)")
        if min(self.n_far, self.n_fresh, self.blocks - 1) < 0:
            raise ModelError("layout sizes must be nonnegative")
        budget = budget_from_env()
        if self.tail_dim > budget:
            raise ModelError(f"tail fiber dimension {self.tail_dim} exceeds budget {budget}")

    # layout -------------------------------------------------------------
    @property
    def op_dim(self) -> int:
        """Size of an element's fiber matrix."""
        return self.blocks * self.fiber_dim

    @property
    def fiber_block(self) -> int:
        return self.fiber_dim + self.n_far

    @property
    def tail_block(self) -> int:
        return self.fiber_dim + self.n_far + self.n_fresh

    @property
    def fiber_dim_total(self) -> int:
        return self.blocks * self.fiber_block

    @property
    def tail_dim(self) -> int:
        return self.blocks * self.tail_block

    def layout_dim(self, kind: str) -> int:
        return self.tail_dim if kind == "tail" else self.fiber_dim_total

    def _block_len(self, kind: str) -> int:
        return self.tail_block if kind == "tail" else self.fiber_block

    def compact_index(self, kind: str) -> np.ndarray:
        L = self._block_len(kind)
        return np.concatenate([b * L + np.arange(self.fiber_dim) for b in range(self.blocks)])

    def far_index(self, kind: str) -> np.ndarray:
        L = self._block_len(kind)
        return np.concatenate([b * L + self.fiber_dim + np.arange(self.n_far) for b in range(self.blocks)]).astype(int)

    def fresh_index(self) -> np.ndarray:
        L = self.tail_block
        off = self.fiber_dim + self.n_far
        return np.concatenate([b * L + off + np.arange(self.n_fresh) for b in range(self.blocks)]).astype(int)

    def vector(self, kind: str = "fiber", compact=None, far=None, fresh=None, block: int = 0) -> np.ndarray:
        """Assemble a vector in a layout from its coordinate groups.

        Each group is a dict ``{index: coefficient}`` or a sequence padded
        with zeros.
        """
        v = np.zeros(self.layout_dim(kind), dtype=complex)
        L = self._block_len(kind)
        parts = [(compact, 0, self.fiber_dim), (far, self.fiber_dim, self.n_far)]
        if fresh is not None:
            if kind != "tail":
                raise ModelError("fresh coordinates exist only in tail fibers")
            parts.append((fresh, self.fiber_dim + self.n_far, self.n_fresh))
        for group, off, size in parts:
            if group is None:
                continue
            items = group.items() if isinstance(group, dict) else enumerate(group)
            for k, val in items:
                if not 0 <= k < size:
                    raise ModelError(f"coordinate {k} outside a group of size {size}")
                v[block * L + off + k] = val
        return v

    def embed(self, x: np.ndarray, kind: str) -> np.ndarray:
        """Extend an element fiber by zero to the non-compact coordinates."""
        D = self.layout_dim(kind)
        idx = self.compact_index(kind)
        out = np.zeros(x.shape[:-2] + (D, D), dtype=complex)
        out[..., idx[:, None], idx[None, :]] = x
        return out

    def e_full(self, kind: str) -> np.ndarray | None:
        if self.extension is None:
            return None
        return np.kron(self.extension.e_prime, np.eye(self._block_len(kind)))

    def fiber_operator(self, x: np.ndarray, scalar: float, kind: str) -> np.ndarray:
        op = self.embed(x, kind)
        E = self.e_full(kind)
        if E is not None and scalar != 0.0:
            op = op + scalar * E
        return op

    def limit_weight(self, kind: str) -> np.ndarray:
        """Matrix ``W`` with ``||lim phi_v|| = (W v, v)`` for vector states."""
        D = self.layout_dim(kind)
        W = np.zeros((D, D), dtype=complex)
        idx = self.compact_index(kind)
        W[idx, idx] = 1.0
        E = self.e_full(kind)
        if E is not None:
            mask = np.ones(D, dtype=bool)
            mask[idx] = False
            W += E * np.outer(mask, mask)
        return W

    def weak_limit_map(self) -> np.ndarray:
        """Selection matrix from the tail layout onto the fiber layout (drops fresh rows)."""
        S = np.zeros((self.fiber_dim_total, self.tail_dim))
        for b in range(self.blocks):
            for k in range(self.fiber_block):
                S[b * self.fiber_block + k, b * self.tail_block + k] = 1.0
        return S

    def escape_axis(self, n: int) -> int:
        """Compact coordinate reserved for explicit fiber ``n`` (1-based), counted from the top."""
        if not 1 <= n <= self.trunc_len:
            raise ModelError(f"fiber index {n} outside 1..{self.trunc_len}")
        return self.fiber_dim - n

    def check_base_support(self, support: int):
        """Reject layouts where explicit escape axes collide with the first ``support`` coordinates."""
        if self.fiber_dim - self.trunc_len < support:
            raise ModelError(
                f"escape axes {self.fiber_dim - self.trunc_len}..{self.fiber_dim - 1} collide with base support of size {support}"
            )


@dataclass(frozen=True)
class SeqElement:
    """Eventually constant element ``lambda e + x`` of the model algebra.

    Attributes
    ----------
    fibers : ndarray, shape (N, m, m)
        Explicit fibers ``x_1..x_N`` with ``m = model.op_dim``.
    tail : ndarray, shape (m, m)
        ``x_inf``, also used for every fiber ``n > N``.
    scalar : float
        Coefficient of the adjoined unit (extension models only).
    """

    model: SeqModel
    fibers: np.ndarray
    tail: np.ndarray
    scalar: float = 0.0

    def __post_init__(self):
        m = self.model.op_dim
        F = np.asarray(self.fibers, dtype=complex)
        T = np.asarray(self.tail, dtype=complex)
        if F.shape != (self.model.trunc_len, m, m) or T.shape != (m, m):
            raise ModelError(f"element shapes {F.shape}, {T.shape} do not match the model")
        if self.model.tail_kind == "diagonal" and np.any(np.abs(T - np.diag(np.diag(T))) > 0):
            raise ModelError("diagonal-limit model requires a diagonal tail")
        if self.scalar != 0.0 and self.model.extension is None:
            raise ModelError("a scalar part needs an extension model")
        object.__setattr__(self, "fibers", F)
        object.__setattr__(self, "tail", T)

    @classmethod
    def constant(cls, model: SeqModel, x, scalar: float = 0.0) -> "SeqElement":
        x = np.asarray(x, dtype=complex)
        return cls(model, np.broadcast_to(x, (model.trunc_len,) + x.shape).copy(), x, scalar)

    def is_self_adjoint(self, tol: float = 1e-12) -> bool:
        herm = lambda X: np.max(np.abs(X - np.swapaxes(X.conj(), -1, -2)), initial=0.0) <= tol
        return bool(herm(self.fibers) and herm(self.tail) and np.isreal(self.scalar))

    def norm(self) -> float:
        M = self.model
        ops = [M.fiber_operator(self.fibers, self.scalar, "fiber"), M.fiber_operator(self.tail, self.scalar, "tail")[None]]
        vals = [np.linalg.norm(op, 2, axis=(-2, -1)).max() for op in ops]
        if M.extension is not None:
            vals.append(abs(self.scalar))
        return float(max(vals))

    def scaled(self, c: float) -> "SeqElement":
        return SeqElement(self.model, c * self.fibers, c * self.tail, c * self.scalar)


def _orthonormal(V, dim: int) -> np.ndarray:
    V = np.asarray(V, dtype=complex)
    if V.ndim == 1:
        V = V[:, None]
    if V.shape[0] != dim:
        raise ModelError(f"basis has {V.shape[0]} rows, layout needs {dim}")
    return range_basis(V) if V.shape[1] else V.reshape(dim, 0)


@dataclass(frozen=True)
class SeqProjection:
    """A projection in the bidual of the model algebra.

    Attributes
    ----------
    fibers : tuple of ndarray
        Orthonormal bases (columns) of ``p_1..p_N`` in the fiber layout.
    infinity : ndarray
        Basis of ``p_inf`` in the fiber layout.
    tail : tuple of ndarray or None
        Bases of the tail classes in the tail layout.  ``None`` marks an
        explicit tail with no family structure.
    scalar : int
        Component in the adjoined ``C`` summand (extension models).
    total : bool
        The tail recurs densely through a total set, so the closure is the
        identity at infinity on every block the tail classes touch.
    closure_scalar : int or None
        Scalar component of the closure when it is fixed by an argument
        outside the model; ``None`` keeps ``scalar``.
    """

    model: SeqModel
    fibers: tuple
    infinity: np.ndarray
    tail: tuple | None
    scalar: int = 0
    total: bool = False
    closure_scalar: int | None = None
    label: str = ""

    def __post_init__(self):
        M = self.model
        if len(self.fibers) != M.trunc_len:
            raise ModelError(f"expected {M.trunc_len} explicit fibers, got {len(self.fibers)}")
        fib = tuple(_orthonormal(V, M.fiber_dim_total) for V in self.fibers)
        inf = _orthonormal(self.infinity, M.fiber_dim_total)
        tail = None if self.tail is None else tuple(_orthonormal(V, M.tail_dim) for V in self.tail)
        if self.scalar not in (0, 1) or (self.scalar and M.extension is None):
            raise ModelError("scalar component must be 0, or 1 in an extension model")
        object.__setattr__(self, "fibers", fib)
        object.__setattr__(self, "infinity", inf)
        object.__setattr__(self, "tail", tail)

    @classmethod
    def build(cls, model, fibers, infinity=None, tail=(), **kw) -> "SeqProjection":
        if infinity is None:
            infinity = np.zeros((model.fiber_dim_total, 0))
        return cls(model, tuple(fibers), infinity, tuple(tail) if tail is not None else None, **kw)

    @property
    def is_zero(self) -> bool:
        ranks = [V.shape[1] for V in self.fibers] + [self.infinity.shape[1]] + [V.shape[1] for V in (self.tail or ())]
        return max(ranks, default=0) == 0 and self.scalar == 0

    def with_tail(self, tail) -> "SeqProjection":
        return replace(self, tail=tuple(tail))


def fiber_bases(p: SeqProjection):
    """Yield ``(label, kind, basis)`` for every fiber class of ``p``."""
    for n, V in enumerate(p.fibers, start=1):
        yield f"n={n}", "fiber", V
    for g, V in enumerate(p.tail or ()):
        yield f"tail[{g}]", "tail", V
    yield "inf", "fiber", p.infinity


def _require_tail(p: SeqProjection, what: str):
    if p.tail is None:
        raise ModelError(f"{what}: explicit tail without family structure")


# closures and lattice operations ------------------------------------------

def closure(p: SeqProjection) -> SeqProjection:
    """Smallest closed projection above ``p``.

    Finite fibers are kept.  The fiber at infinity becomes ``p_inf`` joined
    with the weak limits of all tail classes, or the identity for a total
    family.
    """
    _require_tail(p, "closure undecidable in model")
    M = p.model
    S = M.weak_limit_map()
    cols = [p.infinity] + [S @ V for V in p.tail]
    if p.total:
        # a total family fills every block its tail classes touch
        L = M.fiber_block
        for b in range(M.blocks):
            rows = slice(b * M.tail_block, (b + 1) * M.tail_block)
            if any(np.linalg.norm(V[rows]) > 1e-12 for V in p.tail):
                block = np.zeros((M.fiber_dim_total, L), dtype=complex)
                block[b * L:(b + 1) * L] = np.eye(L)
                cols.append(block)
    inf = range_basis(np.concatenate(cols, axis=1))
    scalar = p.scalar if p.closure_scalar is None else p.closure_scalar
    return replace(p, infinity=inf, scalar=scalar, label=(p.label + "-closure") if p.label else "")


def _same_range(A: np.ndarray, B: np.ndarray, tol: float = 1e-8) -> bool:
    if A.shape[1] != B.shape[1]:
        return False
    return bool(np.linalg.norm(A @ A.conj().T - B @ B.conj().T, 2) <= tol) if A.shape[1] else True


def is_closed(p: SeqProjection) -> bool:
    c = closure(p)
    return _same_range(c.infinity, p.infinity) and c.scalar == p.scalar


def is_compact_in_model(p: SeqProjection, tol: float = 1e-10) -> bool:
    """Closed with no mass on far or fresh coordinates."""
    if not is_closed(p) or p.scalar:
        return False
    M = p.model
    for _, kind, V in fiber_bases(p):
        mask = np.ones(M.layout_dim(kind), dtype=bool)
        mask[M.compact_index(kind)] = False
        if V.shape[1] and np.linalg.norm(V[mask]) > tol:
            return False
    return True


def join(p: SeqProjection, q: SeqProjection) -> SeqProjection:
    """Fiberwise join; tail classes are paired by position."""
    if p.model != q.model:
        raise ModelError("join needs projections in the same model")
    if (p.tail is None) != (q.tail is None) or (p.tail is not None and len(p.tail) != len(q.tail)):
        raise ModelError("tail classes of the two projections do not line up")
    cat = lambda A, B: range_basis(np.concatenate([A, B], axis=1))
    return SeqProjection(
        p.model,
        tuple(cat(A, B) for A, B in zip(p.fibers, q.fibers)),
        cat(p.infinity, q.infinity),
        None if p.tail is None else tuple(cat(A, B) for A, B in zip(p.tail, q.tail)),
        scalar=max(p.scalar, q.scalar),
        total=p.total or q.total,
    )


def amplify(p: SeqProjection, k: int) -> SeqProjection:
    """``diag(p, ..., p)`` in the model of ``A ⊗ M_k``."""
    M = p.model
    if M.extension is not None:
        raise ModelError("amplification of extension models is not supported")
    if k < 1:
        raise ModelError("k must be positive")
    big = replace(M, blocks=M.blocks * k)
    I = np.eye(k)
    return SeqProjection(
        big,
        tuple(np.kron(I, V) for V in p.fibers),
        np.kron(I, p.infinity),
        None if p.tail is None else tuple(np.kron(I, V) for V in p.tail),
        total=p.total,
    )


def amplify_element(a: SeqElement, k: int, model: SeqModel) -> SeqElement:
    I = np.eye(k)
    return SeqElement(model, np.stack([np.kron(I, x) for x in a.fibers]), np.kron(I, a.tail))


# fiberwise spectral quantities ---------------------------------------------

def _min_compressed(ops_by_kind, p: SeqProjection, per_fiber_ops: np.ndarray | None = None):
    """Smallest eigenvalue of ``V^* op V`` over all fibers, with the fiber label."""
    best, where = np.inf, None
    for label, kind, V in fiber_bases(p):
        if V.shape[1] == 0:
            continue
        if kind == "fiber" and label.startswith("n=") and per_fiber_ops is not None:
            op = per_fiber_ops[int(label[2:]) - 1]
        else:
            op = ops_by_kind[kind]
        val = np.linalg.eigvalsh(hermitian(V.conj().T @ op @ V))[0]
        if val < best:
            best, where = float(val), label
    return best, where


def _batched_min(p: SeqProjection, op_fiber_n: np.ndarray, op_tail: np.ndarray, op_inf: np.ndarray) -> tuple[float, str | None]:
    """Vectorized version of :func:`_min_compressed` grouping fibers by rank."""
    best, where = np.inf, None
    for kind, _, idx, Vs in _fiber_groups(p):
        ops = op_fiber_n[idx] if kind == "n" else op_tail[None]
        C = np.swapaxes(Vs.conj(), -1, -2) @ ops @ Vs
        C = 0.5 * (C + np.swapaxes(C.conj(), -1, -2))
        vals = np.linalg.eigvalsh(C)[:, 0]
        j = int(np.argmin(vals))
        if vals[j] < best:
            best = float(vals[j])
            where = f"n={idx[j] + 1}" if kind == "n" else f"tail[{idx[j]}]"
    if p.infinity.shape[1]:
        V = p.infinity
        val = float(np.linalg.eigvalsh(hermitian(V.conj().T @ op_inf @ V))[0])
        if val < best:
            best, where = val, "inf"
    return best, where


def _element_min_compressed(p: SeqProjection, a: SeqElement, shift_projection: bool = False):
    M = p.model
    op_n = M.fiber_operator(a.fibers, a.scalar, "fiber")
    op_t = M.fiber_operator(a.tail, a.scalar, "tail")
    op_i = M.fiber_operator(a.tail, a.scalar, "fiber")
    return _batched_min(p, op_n, op_t, op_i)


def approx_identity(model: SeqModel, i: int) -> SeqElement:
    """``e_i``: the cut-off ``Q_i = sum_{k<=i} e_k e_k^*`` in every fiber and block."""
    if not 0 <= i <= model.fiber_dim:
        raise ModelError(f"approximate identity index {i} beyond the truncation d={model.fiber_dim}")
    q = np.zeros(model.fiber_dim)
    q[:i] = 1.0
    Q = np.kron(np.eye(model.blocks), np.diag(q)).astype(complex)
    return SeqElement.constant(model, Q)


def eps_sequence(p: SeqProjection, schedule=None) -> tuple[np.ndarray, np.ndarray]:
    """``epsilon_i``, the least eigenvalue of ``p e_i p`` on ``range(p)``, for ``i`` in ``schedule``."""
    M = p.model
    sched = np.arange(1, M.fiber_dim + 1) if schedule is None else np.asarray(schedule, dtype=int)
    eps = []
    for i in sched:
        e = approx_identity(M, int(i))
        val, _ = _element_min_compressed(p, e)
        eps.append(1.0 if not np.isfinite(val) else val)
    return sched, np.clip(np.array(eps), 0.0, 1.0)


@dataclass(frozen=True)
class Extrapolation:
    limit: float
    residual: float
    method: str
    reliable: bool


def extrapolate_limit(i: np.ndarray, eps: np.ndarray, tol: float = 1e-10) -> Extrapolation:
    """Estimate ``lim eps_i`` from the last third of the schedule.

    Fits ``eps_i = eps_inf - c / i^p`` through the log of successive
    differences.  A flat tail returns the last value; a poor fit falls
    back to the last value plus the spread of the window.
    """
    i = np.asarray(i, dtype=float)
    eps = np.asarray(eps, dtype=float)
    k = max(3, len(eps) // 3)
    wi, we = i[-k:], eps[-k:]
    diffs = np.diff(we)
    monotone = bool(np.all(diffs >= -1e-9))
    spread = float(we.max() - we.min())
    if spread <= tol:
        return Extrapolation(float(we[-1]), 0.0, "flat", monotone)
    pos = diffs > tol
    if pos.sum() >= 3:
        mid = 0.5 * (wi[1:] + wi[:-1])[pos]
        slope, icpt = np.polyfit(np.log(mid), np.log(diffs[pos]), 1)
        pw = -slope - 1.0
        fit = np.polyval([slope, icpt], np.log(mid))
        residual = float(np.sqrt(np.mean((fit - np.log(diffs[pos])) ** 2)))
        if pw > 0.05 and residual < 0.5:
            c = np.exp(icpt) / pw
            limit = float(min(1.0, we[-1] + c * wi[-1] ** (-pw)))
            return Extrapolation(limit, residual, "power-law", monotone)
    return Extrapolation(float(min(1.0, we[-1] + spread)), spread, "last+spread", False)


@dataclass(frozen=True)
class AlphaEstimate:
    """Interval ``[lower, upper]`` for alpha with the provenance of each end."""

    lower: float
    upper: float
    lower_source: str
    upper_source: str
    eps_sequence: tuple = ()
    flags: tuple = ()

    @property
    def width(self) -> float:
        if np.isinf(self.upper) and np.isinf(self.lower):
            return 0.0
        return float(self.upper - self.lower)

    def contains(self, value: float, tol: float = 0.0) -> bool:
        if np.isinf(value):
            return bool(np.isinf(self.lower))
        return bool(self.lower - tol <= value <= self.upper + tol)

    def to_record(self) -> dict:
        return {
            "alpha_lower": self.lower,
            "alpha_upper": self.upper,
            "eps_sequence": list(self.eps_sequence),
            "sources": {"lower": self.lower_source, "upper": self.upper_source},
            "flags": list(self.flags),
        }


def _inv(x: float, floor: float = 1e-14) -> float:
    return np.inf if x <= floor else 1.0 / x


def alpha_spectra(p: SeqProjection, schedule=None, tol: Tolerances = DEFAULT_TOL) -> AlphaEstimate:
    """Alpha interval from the spectra of ``p e_i p``.

    Each ``e_i / epsilon_i`` is a witness, so ``1 / max epsilon_i`` is an
    upper bound.  The extrapolated limit gives the lower end.
    """
    if p.model.extension is not None:
        raise ModelError("approximate-identity spectra are not used for extension models")
    if p.is_zero:
        return AlphaEstimate(1.0, 1.0, "zero projection", "zero projection")
    sched, eps = eps_sequence(p, schedule)
    ext = extrapolate_limit(sched, eps)
    flags = () if ext.reliable else ("extrapolation unreliable",)
    limit = max(ext.limit, float(eps.max()))
    if limit < tol.eps_floor:
        return AlphaEstimate(np.inf, np.inf, "eps-floor", "eps-floor", tuple(eps), flags)
    upper = _inv(float(eps.max()))
    return AlphaEstimate(_inv(limit), upper, f"spectra-{ext.method}", "spectra-witness", tuple(eps), flags)


def alpha_witness(p: SeqProjection, a: SeqElement, tol: Tolerances = DEFAULT_TOL) -> float:
    """Verify ``p <= pap`` fiberwise and return ``||a||``.

    Raises
    ------
    WitnessRejected
        With the first fiber where the compression of ``a`` has an eigenvalue
        below 1.
    """
    if not a.is_self_adjoint():
        raise ModelError("witness must be self-adjoint")
    if p.is_zero:
        return a.norm()
    val, where = _element_min_compressed(p, a)
    if val < 1.0 - tol.psd * max(1.0, a.norm()):
        raise WitnessRejected(where, val)
    if p.scalar and a.scalar < 1.0 - tol.psd:
        raise WitnessRejected("scalar", a.scalar)
    return a.norm()


def alpha_majorized(p: SeqProjection, a: SeqElement, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True iff ``p <= a`` on every fiber, so that alpha(p) = 1."""
    M = p.model
    for label, kind, V in fiber_bases(p):
        if label.startswith("n="):
            x = a.fibers[int(label[2:]) - 1]
        else:
            x = a.tail
        op = M.fiber_operator(x, a.scalar, kind)
        if np.linalg.eigvalsh(hermitian(op - V @ V.conj().T))[0] < -tol.psd:
            return False
    return not (p.scalar and a.scalar < 1.0 - tol.psd)


def alpha_state_limit(p: SeqProjection) -> float:
    """Lower bound ``1 / inf ||phi||`` over limits of vector states supported by ``p``.

    In every fiber class the limit of ``(x v, v)`` has norm ``(W v, v)``
    (see :meth:`SeqModel.limit_weight`), so the infimum is the least
    eigenvalue of ``V^* W V``.  Convex combinations cannot go lower, since
    the norm is affine on positive functionals.  The scalar character
    contributes norm 1 when ``p`` has a scalar component.
    """
    _require_tail(p, "no state families available")
    if p.is_zero:
        return 1.0
    M = p.model
    Wf, Wt = M.limit_weight("fiber"), M.limit_weight("tail")
    N = M.trunc_len
    val, _ = _batched_min(p, np.broadcast_to(Wf, (N,) + Wf.shape), Wt, Wf)
    val = min(val, 1.0)
    return _inv(val)


def alpha_sandwich(
    p: SeqProjection,
    witness: SeqElement | None = None,
    majorant: SeqElement | None = None,
    use_spectra: bool | None = None,
    tol: Tolerances = DEFAULT_TOL,
) -> AlphaEstimate:
    """Combine the state-limit, witness and spectra bounds into one interval.

    Raises
    ------
    ModelInconsistency
        If the lower end exceeds the upper end by more than ``tol.alpha``.
    """
    if use_spectra is None:
        use_spectra = p.model.extension is None
    lower, lsrc = alpha_state_limit(p), "state-limit"
    upper, usrc = np.inf, "none"
    eps: tuple = ()
    flags: tuple = ()
    if use_spectra:
        spec = alpha_spectra(p, tol=tol)
        eps, flags = spec.eps_sequence, spec.flags
        if spec.lower > lower:
            lower, lsrc = spec.lower, spec.lower_source
        if spec.upper < upper:
            upper, usrc = spec.upper, spec.upper_source
    if witness is not None:
        w = alpha_witness(p, witness, tol)
        if w < upper:
            upper, usrc = w, "witness"
    if majorant is not None and alpha_majorized(p, majorant, tol):
        upper, usrc = 1.0, "majorant"
    if lower > upper * (1 + tol.alpha) + tol.alpha:
        raise ModelInconsistency(f"alpha lower {lower!r} ({lsrc}) exceeds upper {upper!r} ({usrc})")
    upper = max(upper, lower) if np.isfinite(lower) else upper
    return AlphaEstimate(float(lower), float(upper), lsrc, usrc, eps, flags)


# regularity -------------------------------------------------------------

def _fiber_groups(p: SeqProjection) -> list:
    """Fibers stacked by (kind, rank) so norms can be taken in one batch."""
    groups: dict = {}
    for n, V in enumerate(p.fibers):
        if V.shape[1]:
            groups.setdefault(("n", V.shape[1]), []).append((n, V))
    for g, V in enumerate(p.tail or ()):
        if V.shape[1]:
            groups.setdefault(("t", V.shape[1]), []).append((g, V))
    return [
        (kind, rank, np.array([i for i, _ in items]), np.stack([V for _, V in items]))
        for (kind, rank), items in groups.items()
    ]


def norm_ap(p: SeqProjection, a: SeqElement, groups: list | None = None) -> float:
    """``||a p||`` as the supremum over all fibers (and the scalar summand).

    ``groups`` is the output of ``_fiber_groups(p)``, for repeated calls.
    """
    M = p.model
    best = 0.0
    if groups is None:
        groups = _fiber_groups(p)
    op_n = M.fiber_operator(a.fibers, a.scalar, "fiber")
    op_t = M.fiber_operator(a.tail, a.scalar, "tail")
    op_i = M.fiber_operator(a.tail, a.scalar, "fiber")
    for kind, rank, idx, Vs in groups:
        ops = op_n[idx] if kind == "n" else op_t[None]
        prod = ops @ Vs
        # a single column's operator norm is its vector norm
        norms = np.linalg.norm(prod[..., 0], axis=-1) if rank == 1 else np.linalg.norm(prod, 2, axis=(-2, -1))
        best = max(best, float(norms.max()))
    if p.infinity.shape[1]:
        best = max(best, float(np.linalg.norm(op_i @ p.infinity, 2)))
    if p.scalar:
        best = max(best, abs(a.scalar))
    return best


def _norm_a_inf(p: SeqProjection, a: SeqElement) -> float:
    M = p.model
    val = 0.0
    if p.infinity.shape[1]:
        val = float(np.linalg.norm(M.fiber_operator(a.tail, a.scalar, "fiber") @ p.infinity, 2))
    if p.scalar:
        val = max(val, abs(a.scalar))
    return val


@dataclass(frozen=True)
class RegularityResult:
    """Outcome of a sampled regularity search."""

    constant: float
    best_element: SeqElement | None
    samples: int
    source: str = ""


def random_element(model: SeqModel, rng: np.random.Generator, constant: bool = True, hermitian_only: bool = False) -> SeqElement:
    m = model.op_dim

    def draw(shape):
        X = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        if hermitian_only:
            X = 0.5 * (X + np.swapaxes(X.conj(), -1, -2))
        return X

    tail = draw((m, m))
    if model.tail_kind == "diagonal":
        tail = np.diag(np.diag(tail).real if hermitian_only else np.diag(tail))
    if constant:
        return SeqElement.constant(model, tail)
    return SeqElement(model, draw((model.trunc_len, m, m)), tail)


def quasi_regularity_constant(
    p: SeqProjection,
    rng: np.random.Generator,
    samples: int = 2000,
    witnesses=(),
    refine: bool = True,
) -> RegularityResult:
    """Largest sampled ratio ``||a pbar|| / ||a p||``; a lower bound on the true constant.

    Elements are Gaussian and eventually constant, half of them constant
    from the first fiber, plus the given ``witnesses``.  For models with
    small fibers the best samples are polished by Nelder-Mead over
    constant elements.
    """
    pbar = closure(p)
    groups = _fiber_groups(p)
    best, arg, src = 1.0, None, "trivial"

    def ratio(a: SeqElement) -> float:
        den = norm_ap(p, a, groups)
        num = max(den, _norm_a_inf(pbar, a))
        if den <= 1e-13 * max(1.0, num):
            scale = max(1.0, a.norm())
            if den <= 1e-13 * scale:
                return np.inf if num > 1e-10 * scale else 1.0
        return num / den

    scored = []
    for a in witnesses:
        r = ratio(a)
        scored.append((r, a))
        if r > best:
            best, arg, src = r, a, "witness"
    for k in range(samples):
        a = random_element(p.model, rng, constant=(k % 2 == 0))
        r = ratio(a)
        scored.append((r, a))
        if r > best:
            best, arg, src = r, a, "sample"

    m = p.model.op_dim
    if refine and m <= 4 and np.isfinite(best):
        from scipy.optimize import minimize

        def unpack(z):
            return SeqElement.constant(p.model, (z[: m * m] + 1j * z[m * m :]).reshape(m, m))

        scored.sort(key=lambda t: -t[0] if np.isfinite(t[0]) else -1e300)
        for r0, a0 in scored[:5]:
            x0 = a0.tail.reshape(-1)
            res = minimize(lambda z: -ratio(unpack(z)), np.concatenate([x0.real, x0.imag]), method="Nelder-Mead",
                           options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000})
            if -res.fun > best:
                best, arg, src = float(-res.fun), unpack(res.x), "refined"
    return RegularityResult(float(best), arg, samples + len(witnesses), src)


@dataclass(frozen=True)
class RegularCheck:
    passed: bool
    counterexample: SeqElement | None
    premise_samples: int
    note: str = ""


def _constraint_rows(p: SeqProjection) -> np.ndarray:
    """Rows of the linear map ``x -> (C^* x C)`` over all fibers, for column-major ``vec(x)``."""
    M = p.model
    rows = []
    for _, kind, V in fiber_bases(p):
        if V.shape[1] == 0:
            continue
        C = V[M.compact_index(kind)]
        rows.append(np.kron(C.T, C.conj().T))
    if not rows:
        return np.zeros((0, M.op_dim**2), dtype=complex)
    return np.concatenate(rows, axis=0)


def zero_regular_check(p: SeqProjection, rng: np.random.Generator, samples: int = 200, witnesses=(), tol: float = 1e-9) -> RegularCheck:
    """Search constant elements with ``pap = 0`` and test ``pbar a pbar = 0``.

    The premise cuts out a linear subspace, computed as a null space; random
    points of it and the given witnesses are tested.
    """
    M = p.model
    pbar = closure(p)
    m = M.op_dim
    Cbar = pbar.infinity[M.compact_index("fiber")]

    def violates(x) -> bool:
        scale = max(1.0, np.linalg.norm(x))
        return Cbar.shape[1] > 0 and np.linalg.norm(Cbar.conj().T @ x @ Cbar) > tol * scale

    for a in witnesses:
        if norm_ap_compressed(p, a) <= tol * max(1.0, a.norm()) and violates(a.tail):
            return RegularCheck(False, a, 0, "witness")
    R = _constraint_rows(p)
    if R.shape[0]:
        _, s, Vh = np.linalg.svd(R, full_matrices=True)
        rank = int(np.sum(s > 1e-10 * max(1.0, s[0])))
        null = Vh[rank:].conj().T
    else:
        null = np.eye(m * m, dtype=complex)
    count = 0
    for _ in range(samples if null.shape[1] else 0):
        z = null @ (rng.standard_normal(null.shape[1]) + 1j * rng.standard_normal(null.shape[1]))
        x = z.reshape(m, m, order="F")
        count += 1
        if violates(x):
            return RegularCheck(False, SeqElement.constant(M, x), count, "null-space sample")
    return RegularCheck(True, None, count, "no violation found")


def norm_ap_compressed(p: SeqProjection, a: SeqElement) -> float:
    """``||p a p||`` over all fibers."""
    M = p.model
    best = 0.0
    for label, kind, V in fiber_bases(p):
        if V.shape[1] == 0:
            continue
        x = a.fibers[int(label[2:]) - 1] if label.startswith("n=") else a.tail
        best = max(best, float(np.linalg.norm(V.conj().T @ M.fiber_operator(x, a.scalar, kind) @ V, 2)))
    return best


def cone_regular_check(p: SeqProjection, rng: np.random.Generator, samples: int = 200, witnesses=(), tol: float = 1e-9) -> RegularCheck:
    """Search self-adjoint ``a`` with ``pap <= 0`` and test ``pbar a pbar <= 0``.

    Samples have the form ``h - mu Q_d`` with ``h`` Gaussian Hermitian and
    ``mu`` the least shift making the premise hold (plus a random margin on
    half the draws).  This needs ``p`` to have no fiber vector invisible to
    ``Q_d``.
    """
    M = p.model
    pbar = closure(p)
    Qd = approx_identity(M, M.fiber_dim).tail
    Cbar = pbar.infinity[M.compact_index("fiber")]
    fibers = [(kind, V[M.compact_index(kind)]) for _, kind, V in fiber_bases(p) if V.shape[1]]
    for _, C in fibers:
        if np.linalg.eigvalsh(hermitian(C.conj().T @ C))[0] <= 1e-12:
            return RegularCheck(True, None, 0, "premise samples unavailable: fiber with invisible vectors")

    def concl_fails(x) -> bool:
        if Cbar.shape[1] == 0:
            return False
        return np.linalg.eigvalsh(hermitian(Cbar.conj().T @ x @ Cbar))[-1] > tol * max(1.0, np.linalg.norm(x))

    for a in witnesses:
        if concl_fails(a.tail):
            premise = all(np.linalg.eigvalsh(hermitian(C.conj().T @ a.tail @ C))[-1] <= tol for _, C in fibers)
            if premise:
                return RegularCheck(False, a, 0, "witness")
    count = 0
    for k in range(samples):
        h = random_element(M, rng, hermitian_only=True).tail
        mu = -np.inf
        for _, C in fibers:
            A = hermitian(C.conj().T @ h @ C)
            B = hermitian(C.conj().T @ C)
            L = np.linalg.cholesky(B)
            Li = np.linalg.inv(L)
            mu = max(mu, float(np.linalg.eigvalsh(hermitian(Li @ A @ Li.conj().T))[-1]))
        if k % 2:
            mu += abs(rng.standard_normal())
        x = h - mu * Qd
        count += 1
        if concl_fails(x):
            return RegularCheck(False, SeqElement.constant(M, x), count, "shifted sample")
    return RegularCheck(True, None, count, "no violation found")


def k_regular_constant(p: SeqProjection, k: int, rng: np.random.Generator, samples: int = 2000, witnesses=(), refine: bool = True) -> RegularityResult:
    """Quasi-regularity constant of ``diag(p, ..., p)`` in ``A ⊗ M_k``."""
    big = amplify(p, k)
    budget = budget_from_env()
    if big.model.tail_dim > budget:
        raise ModelError(f"amplified dimension {big.model.tail_dim} exceeds budget {budget}")
    return quasi_regularity_constant(big, rng, samples, witnesses, refine)


def formula_4_9(K: float) -> float:
    """``K^2 / (2 - K^2)`` for ``K < sqrt 2``."""
    if not 0 <= K < np.sqrt(2.0):
        raise ValueError("formula_4_9 needs 0 <= K < sqrt(2)")
    return K * K / (2.0 - K * K)


def formula_4_11(s: float, K: float) -> float:
    """``s / (s - K^2 (s - 1))`` for ``K^2 < s / (s - 1)``."""
    if s < 1 or K < 0:
        raise ValueError("formula_4_11 needs s >= 1 and K >= 0")
    den = s - K * K * (s - 1.0)
    if den <= 0:
        raise ValueError("formula_4_11 needs K^2 < s/(s-1)")
    return s / den


# pair geometry over fibers --------------------------------------------------

def _paired_fibers(p: SeqProjection, q: SeqProjection):
    if p.model != q.model:
        raise ModelError("projections live in different models")
    if (p.tail is None) != (q.tail is None) or (p.tail is not None and len(p.tail) != len(q.tail)):
        raise ModelError("tail classes of the two projections do not line up")
    for (lab, kind, A), (_, _, B) in zip(fiber_bases(p), fiber_bases(q)):
        yield lab, A @ A.conj().T, B @ B.conj().T


def seq_norm_distance(p: SeqProjection, q: SeqProjection) -> float:
    """``||p - q||`` as the supremum over fibers."""
    from .pairgeom import pair_norm_distance

    d = max(pair_norm_distance(P, Q) for _, P, Q in _paired_fibers(p, q))
    if p.scalar != q.scalar:
        d = 1.0
    return float(d)


def seq_angle(p: SeqProjection, q: SeqProjection) -> float:
    """Smallest generic angle over all fibers; ``pi/2`` when none."""
    from .pairgeom import angle

    return float(min(angle(P, Q) for _, P, Q in _paired_fibers(p, q)))


# serialization -------------------------------------------------------------

def _coeffs(v: np.ndarray, digits: int = 12) -> str:
    nz = [(k, complex(c)) for k, c in enumerate(v) if abs(c) > 1e-14]
    parts = []
    for k, c in nz:
        if abs(c.imag) < 1e-14:
            parts.append(f"{k}:{round(c.real, digits)!r}")
        else:
            parts.append(f"{k}:{round(c.real, digits)!r}{round(c.imag, digits):+}j")
    return "[" + ", ".join(parts) + "]"


def describe(model: SeqModel, projections: dict | None = None) -> str:
    """Key-value text descriptor of a model and, optionally, its projections' tail generators."""
    lines = [
        f"fiber_dim = {model.fiber_dim}",
        f"trunc_len = {model.trunc_len}",
        f"tail_kind = {model.tail_kind}",
        f"n_far = {model.n_far}",
        f"n_fresh = {model.n_fresh}",
        f"blocks = {model.blocks}",
    ]
    if model.extension is not None:
        E = model.extension.e_prime.real
        lines.append(f"extension.e_prime = [{E[0,0]!r}, {E[0,1]!r}, {E[1,0]!r}, {E[1,1]!r}]")
    for name, p in (projections or {}).items():
        lines.append(f"{name}.scalar = {p.scalar}")
        lines.append(f"{name}.total = {str(p.total).lower()}")
        lines.append(f"{name}.inf = " + "; ".join(_coeffs(c) for c in p.infinity.T))
        for g, V in enumerate(p.tail or ()):
            lines.append(f"{name}.tail.{g} = " + "; ".join(_coeffs(c) for c in V.T))
    return "\n".join(lines) + "\n"
