"""Catalog of worked examples built in the truncated sequence model.

Each builder takes a parameter dict and a truncation, constructs the
projections and witnesses in a :class:`~projkit.seqmodel.SeqModel`, measures
the relevant quantities and compares them with the claimed values.  The
result is a :class:`CatalogEntry`; :func:`entry_report` turns it into the
JSON-ready record emitted by the command-line tool.

Entry identifiers follow the numbering of the source examples ("3.5",
"4.13a", ...).  Examples that cannot be realized in the model are listed in
:data:`NOT_BUILT` with the reason.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize, nnls

from .config import DEFAULT_TOL
from .linalg import min_eig, psd_geq, spectral_projection
from .seqmodel import (
    BusbyExtension,
    ModelError,
    SeqElement,
    SeqModel,
    SeqProjection,
    alpha_majorized,
    alpha_sandwich,
    alpha_state_limit,
    closure,
    cone_regular_check,
    formula_4_11,
    is_closed,
    is_compact_in_model,
    join,
    k_regular_constant,
    quasi_regularity_constant,
    seq_norm_distance,
    zero_regular_check,
)

__all__ = [
    "Claim",
    "CatalogEntry",
    "CATALOG",
    "PARAMS",
    "NOT_BUILT",
    "REPORT_SCHEMA",
    "build_example",
    "default_model",
    "rank_one_element",
    "entry_report",
    "diagonal_enumeration",
    "lemma_3_7_vector",
    "lemma_3_7_check",
    "lemma_4_12_check",
    "spectral_inequality_suite",
    "minimal_lambda3",
    "achievable_pairs_table",
    "jsonable",
]

REPORT_SCHEMA = "projkit.example/1"
DEFAULT_TRUNC = 32
WIDTH_LIMIT = 0.1

NOT_BUILT = {
    "6.3a": "needs an extension of K ⊕ K by the free algebra on two projections; not a sequence model",
    "4.15a": "needs an extension of K ⊕ K by M_2 through a Calkin-faithful representation; not a sequence model",
    "5.5": "concerns a non-sigma-unital algebra, outside the model",
    "7.2c": "non-attainment argument is qualitative; only the diagonal-tail variant 7.2a is measured",
    "4.10c": "the family V_m of shrinking vectors needs unboundedly many scales; cone-regularity without quasi-regularity is not measurable at a fixed truncation",
}


# entries -------------------------------------------------------------------

@dataclass
class Claim:
    """An expected value with its provenance and check rule.

    ``check`` is one of ``"interval"`` (alpha interval containment, width at
    most ``WIDTH_LIMIT`` for finite values), ``"close"``, ``"true"``,
    ``"at_least"``, ``"at_most"`` or ``"range"`` (``value`` is ``(lo, hi)``).
    """

    name: str
    value: object
    citation: str
    check: str = "close"
    tol: float = 1e-8
    measured_key: str | None = None

    def evaluate(self, measured: dict) -> bool:
        m = measured[self.measured_key or self.name]
        if self.check == "interval":
            lo, hi = m["lower"], m["upper"]
            v = self.value
            if np.isinf(v):
                return bool(np.isinf(lo))
            return bool(lo - self.tol <= v <= hi + self.tol and hi - lo <= WIDTH_LIMIT)
        if self.check == "close":
            if np.isinf(self.value):
                return bool(np.isinf(m))
            return bool(abs(m - self.value) <= self.tol)
        if self.check == "true":
            return bool(m) is bool(self.value)
        if self.check == "at_least":
            return bool(m >= self.value - self.tol)
        if self.check == "at_most":
            return bool(m <= self.value + self.tol)
        if self.check == "range":
            lo, hi = self.value
            return bool(lo <= m <= hi)
        raise ValueError(f"unknown check {self.check!r}")


@dataclass
class CatalogEntry:
    """A built example: model, projections, witnesses and the measured report."""

    id: str
    params: dict
    model: SeqModel | None
    projections: dict
    witnesses: dict
    measured: dict
    claims: list
    citation: str
    notes: list = field(default_factory=list)

    @property
    def results(self) -> dict:
        return {c.name: c.evaluate(self.measured) for c in self.claims}

    @property
    def passed(self) -> bool:
        return all(self.results.values())


def jsonable(x, digits: int = 12):
    """Plain-JSON form: floats rounded to ``digits`` significant digits, infinities as strings."""
    if isinstance(x, dict):
        return {str(k): jsonable(v, digits) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v, digits) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if np.isnan(x):
            return "nan"
        if np.isinf(x):
            return "inf" if x > 0 else "-inf"
        return float(f"{x:.{digits}g}")
    if x is None or isinstance(x, str):
        return x
    raise TypeError(f"cannot serialize {type(x).__name__}")


def entry_report(entry: CatalogEntry) -> dict:
    results = entry.results
    expected = {
        c.name: {"value": c.value, "check": c.check, "tol": c.tol, "citation": c.citation, "pass": results[c.name]}
        for c in entry.claims
    }
    return jsonable(
        {
            "schema": REPORT_SCHEMA,
            "id": entry.id,
            "params": entry.params,
            "measured": entry.measured,
            "expected": expected,
            "citation": entry.citation,
            "notes": entry.notes,
            "pass": entry.passed,
        }
    )


# model helpers ------------------------------------------------------------------

def default_model(trunc: int = DEFAULT_TRUNC, fiber_dim: int | None = None, **kw) -> SeqModel:
    """``c ⊗ K`` model with ``d = N + 16`` unless given; ``N >= 8`` and ``d >= N + 4``."""
    d = trunc + 16 if fiber_dim is None else fiber_dim
    if trunc < 8:
        raise ModelError("the sequence model needs at least 8 explicit fibers")
    if d < trunc + 4:
        raise ModelError(f"fiber_dim {d} leaves no room for {trunc} escape axes (need d >= N + 4)")
    return SeqModel(fiber_dim=d, trunc_len=trunc, **kw)


def matrix_model(k: int, trunc: int = DEFAULT_TRUNC, **kw) -> SeqModel:
    """``c ⊗ M_k``: no far or fresh coordinates."""
    return SeqModel(fiber_dim=k, trunc_len=trunc, n_far=0, n_fresh=0, **kw)


def rank_one_element(M: SeqModel, vec) -> SeqElement:
    """Constant element ``v v^*`` on the compact coordinates."""
    v = np.asarray(vec, dtype=complex)
    return SeqElement.constant(M, np.outer(v, v.conj()))


def _diag_element(M: SeqModel, diag, scalar: float = 0.0) -> SeqElement:
    return SeqElement.constant(M, np.diag(np.asarray(diag, dtype=complex)), scalar)


def diagonal_enumeration(n: int) -> list[int]:
    """First ``n`` terms of ``1, 1, 2, 1, 2, 3, ...``, which lists every positive integer infinitely often."""
    out, k = [], 1
    while len(out) < n:
        out.extend(range(1, k + 1))
        k += 1
    return out[:n]


def _alpha(p, witness=None, majorant=None, use_spectra=None) -> dict:
    est = alpha_sandwich(p, witness, majorant, use_spectra)
    return {
        "lower": est.lower,
        "upper": est.upper,
        "lower_source": est.lower_source,
        "upper_source": est.upper_source,
        "flags": list(est.flags),
    }


def _rng(entry_id: str, seed: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), zlib.crc32(entry_id.encode())])


def _theta_from_s(s: float) -> float:
    if not 1 < s < np.inf:
        raise ValueError(f"s must lie in (1, inf), got {s!r}")
    return float(np.arccos(s**-0.5))


def _check_theta(theta: float):
    if not 0 < theta < np.pi / 2:
        raise ValueError(f"theta must lie in (0, pi/2), got {theta!r}")


def _escape_vector(M, base: dict, c: float, axis: int | None, block: int = 0, kind: str = "fiber", fresh: int = 0):
    """``u + c f`` where ``f`` is the compact axis ``axis`` or, in the tail, a fresh coordinate."""
    if kind == "tail":
        return M.vector("tail", compact=base, fresh={fresh: c}, block=block)
    comp = dict(base)
    comp[axis] = comp.get(axis, 0.0) + c
    return M.vector("fiber", compact=comp, block=block)


def _cos_family(M, theta: float, block: int = 0):
    """Explicit fibers ``cos theta e_1 + sin theta e_A(n)`` and the escaping tail class."""
    c, s = np.cos(theta), np.sin(theta)
    fibers = [_escape_vector(M, {0: c}, s, M.escape_axis(n), block) for n in range(1, M.trunc_len + 1)]
    tail = _escape_vector(M, {0: c}, s, None, block, kind="tail")
    return fibers, tail


def _same_range(A, B, tol: float = 1e-10) -> bool:
    """Whether two column bases span the same subspace."""
    A = A.reshape(A.shape[0], -1)
    B = B.reshape(B.shape[0], -1)
    return bool(np.linalg.norm(A @ A.conj().T - B @ B.conj().T, 2) < tol)


# builders --------------------------------------------------------------------------

def _build_3_2(params, trunc, fiber_dim):
    M = default_model(trunc, fiber_dim)
    M.check_base_support(1)
    e1 = M.vector(compact={0: 1})
    compact = SeqProjection.build(M, [e1] * trunc, e1, [M.vector("tail", compact={0: 1})], label="compact")
    unit = SeqProjection.build(
        M, [np.eye(M.fiber_dim_total)] * trunc, np.eye(M.fiber_dim_total), [np.eye(M.tail_dim)], label="unit"
    )
    w = rank_one_element(M, np.eye(M.fiber_dim)[0])
    measured = {
        "alpha_compact": _alpha(compact, witness=w),
        "alpha_compact_closure": _alpha(closure(compact), witness=w),
        "alpha_unit": _alpha(unit),
        "alpha_unit_closure": _alpha(closure(unit)),
        "compact_is_closed": is_closed(compact),
        "unit_is_closed": is_closed(unit),
    }
    cite = "example 3.2: a clopen central projection has both alphas equal to 1 or both infinite"
    claims = [
        Claim("alpha_compact", 1.0, cite, "interval"),
        Claim("alpha_compact_closure", 1.0, cite, "interval"),
        Claim("alpha_unit", np.inf, cite, "interval"),
        Claim("alpha_unit_closure", np.inf, cite, "interval"),
        Claim("compact_is_closed", True, cite, "true"),
        Claim("unit_is_closed", True, cite, "true"),
    ]
    return M, {"compact": compact, "unit": unit}, {"e1": w}, measured, claims, cite


def _build_3_3(params, trunc, fiber_dim):
    k = int(params.get("k", 2))
    if k < 1:
        raise ValueError("k must be positive")
    M = matrix_model(k, trunc)
    I = np.eye(k)
    p = SeqProjection.build(M, [I] * trunc, I, [I], label="unit")
    unit = SeqElement.constant(M, I)
    measured = {"alpha_p": _alpha(p, majorant=unit), "alpha_closure": _alpha(closure(p), majorant=unit)}
    cite = "example 3.3: the unit of a unital algebra realizes the pair (1, 1)"
    claims = [Claim("alpha_p", 1.0, cite, "interval"), Claim("alpha_closure", 1.0, cite, "interval")]
    return M, {"p": p}, {"unit": unit}, measured, claims, cite


def _build_3_4(params, trunc, fiber_dim):
    M = default_model(trunc, fiber_dim)
    p = SeqProjection.build(M, [np.eye(M.fiber_dim_total)] * trunc, np.eye(M.fiber_dim_total), [np.eye(M.tail_dim)], label="unit")
    measured = {"alpha_p": _alpha(p), "alpha_closure": _alpha(closure(p))}
    cite = "example 3.4: the unit of a non-unital algebra realizes the pair (inf, inf)"
    claims = [Claim("alpha_p", np.inf, cite, "interval"), Claim("alpha_closure", np.inf, cite, "interval")]
    return M, {"p": p}, {}, measured, claims, cite


def _build_3_5(params, trunc, fiber_dim):
    theta = float(params.get("theta", np.pi / 4))
    _check_theta(theta)
    s = 1.0 / np.cos(theta) ** 2
    M = default_model(trunc, fiber_dim)
    M.check_base_support(1)
    fibers, tail = _cos_family(M, theta)
    e1 = M.vector(compact={0: 1})
    p = SeqProjection.build(M, fibers, e1, [tail], label="closed")
    q = SeqProjection.build(M, fibers, None, [tail], label="open")
    a = _diag_element(M, s * np.eye(M.fiber_dim)[0])
    qaq_dev = max(
        float(np.linalg.norm(V.conj().T @ M.fiber_operator(a.tail, 0.0, "fiber") @ V - np.eye(V.shape[1]), 2)) for V in q.fibers
    )
    measured = {
        "s": s,
        "alpha_p": _alpha(p, witness=a),
        "alpha_q": _alpha(q, witness=a),
        "closure_of_q_is_p": _same_range(closure(q).infinity, p.infinity),
        "p_is_closed": is_closed(p),
        "qaq_minus_q": qaq_dev,
        "state_limit": alpha_state_limit(q),
    }
    cite = "example 3.5: the witness s e1e1* and the escaping vector states pin alpha(p) = alpha(q) = s"
    claims = [
        Claim("alpha_p", s, cite, "interval", 1e-6),
        Claim("alpha_q", s, cite, "interval", 1e-6),
        Claim("closure_of_q_is_p", True, cite, "true"),
        Claim("p_is_closed", True, cite, "true"),
        Claim("qaq_minus_q", 0.0, cite, "close", 1e-10),
    ]
    return M, {"p": p, "q": q}, {"a": a}, measured, claims, cite


def _recurrent_cos_projection(M, theta: float, block: int = 0, **kw):
    """Open projection with fibers ``v_{m_n}`` and every ``v_m`` recurring in the tail."""
    c, s = np.cos(theta), np.sin(theta)
    N = M.trunc_len
    v = {m: _escape_vector(M, {0: c}, s, M.escape_axis(m), block) for m in range(1, N + 1)}
    fibers = [v[m] for m in diagonal_enumeration(N)]
    S = M.weak_limit_map()
    recurrent = [S.T @ v[m] for m in range(1, N + 1)]
    escaping = _escape_vector(M, {0: c}, s, None, block, kind="tail")
    return SeqProjection.build(M, fibers, None, recurrent + [escaping], total=True, **kw)


def _build_3_6(params, trunc, fiber_dim):
    s = float(params.get("s", 2.0))
    theta = _theta_from_s(s)
    M = default_model(trunc, fiber_dim)
    M.check_base_support(1)
    p = _recurrent_cos_projection(M, theta, label="open")
    a = _diag_element(M, s * np.eye(M.fiber_dim)[0])
    pbar = closure(p)
    measured = {
        "alpha_p": _alpha(p, witness=a),
        "alpha_closure": _alpha(pbar),
        "closure_rank_at_infinity": int(pbar.infinity.shape[1]),
        "fiber_rank_total": int(M.fiber_dim_total),
    }
    cite = "example 3.6: recurrent escaping vectors give alpha(p) = s and a total closure with alpha infinite"
    claims = [
        Claim("alpha_p", s, cite, "interval", 1e-6),
        Claim("alpha_closure", np.inf, cite, "interval"),
        Claim("closure_rank_at_infinity", M.fiber_dim_total, cite, "close", 0),
    ]
    return M, {"p": p, "closure": pbar}, {"a": a}, measured, claims, cite


def lemma_3_7_vector(x: float, y: float, phase: float = 0.0) -> np.ndarray:
    """Unit vector ``u`` with ``u u^* <= diag(x, y)``, tight in the second coordinate."""
    if not x > 1 > y > 0:
        raise ValueError("need x > 1 > y > 0")
    u1 = np.sqrt(x * (1 - y) / (x - y))
    u2 = np.sqrt(y * (x - 1) / (x - y))
    return np.array([u1, u2 * np.exp(1j * phase)])


def _k_diagonal(d: int) -> np.ndarray:
    """``K = diag(2, 1/2, 1/3, ...)``: positive, one-to-one, norm above 1."""
    return np.concatenate([[2.0], 1.0 / np.arange(2, d + 1)])


def _sweep_section(K: np.ndarray, count: int):
    """Unit vectors in ``{u : u u^* <= K}`` on coordinate pairs ``(1, j)``.

    Low-discrepancy sweep over the pair ``j``, the weight of ``e_j`` (up to
    the tight value) and its phase.
    """
    d = len(K)
    golden = (np.sqrt(5) - 1) / 2
    out = []
    for n in range(count):
        j = 1 + n % (d - 1)
        tight = lemma_3_7_vector(K[0], K[j])
        r = tight[1].real * (1.0 if n < d - 1 else ((n * golden) % 1.0))
        psi = 2 * np.pi * ((n * np.sqrt(2)) % 1.0)
        u = np.zeros(d, dtype=complex)
        u[0] = np.sqrt(1 - r * r)
        u[j] = r * np.exp(1j * psi)
        out.append(u)
    return out


def _majorized_open_projection(M, K, block: int = 0, tail_count: int | None = None, **kw):
    d = M.fiber_dim
    N = M.trunc_len
    tail_count = 4 * (d - 1) if tail_count is None else tail_count
    us = _sweep_section(K, max(N, tail_count))
    fibers = [M.vector(compact=dict(enumerate(u)), block=block) for u in us[:N]]
    tail = [M.vector("tail", compact=dict(enumerate(u)), block=block) for u in us[:tail_count]]
    return SeqProjection.build(M, fibers, None, tail, total=True, **kw)


def _build_3_7(params, trunc, fiber_dim):
    M = default_model(trunc, fiber_dim)
    K = _k_diagonal(M.fiber_dim)
    p = _majorized_open_projection(M, K, label="open")
    a = _diag_element(M, K)
    pbar = closure(p)
    measured = {
        "alpha_p": _alpha(p, majorant=a),
        "majorized": alpha_majorized(p, a),
        "alpha_closure": _alpha(pbar),
    }
    cite = "example 3.7: p <= K gives alpha(p) = 1 while the closure is total, so alpha(closure) is infinite"
    claims = [
        Claim("alpha_p", 1.0, cite, "interval"),
        Claim("majorized", True, cite, "true"),
        Claim("alpha_closure", np.inf, cite, "interval"),
    ]
    return M, {"p": p, "closure": pbar}, {"a": a}, measured, claims, cite


def _extension_model(trunc, fiber_dim, t):
    d = trunc + 16 if fiber_dim is None else fiber_dim
    if d < trunc + 4:
        raise ModelError(f"fiber_dim {d} leaves no room for {trunc} escape axes (need d >= N + 4)")
    return SeqModel(fiber_dim=d, trunc_len=trunc, extension=BusbyExtension.from_t(t), blocks=2)


def _build_3_8(params, trunc, fiber_dim):
    t = float(params.get("t", 3.0))
    if not 1 < t < np.inf:
        raise ValueError("t must lie in (1, inf)")
    M = _extension_model(trunc, fiber_dim, t)
    d = M.fiber_dim
    K = _k_diagonal(d)
    p = _majorized_open_projection(M, K, block=0, closure_scalar=1, label="open")
    maj = np.zeros((2 * d, 2 * d), dtype=complex)
    maj[:d, :d] = np.diag(K)
    majorant = SeqElement.constant(M, maj)
    te = SeqElement.constant(M, np.zeros((2 * d, 2 * d)), scalar=t)
    pbar = closure(p)
    measured = {
        "alpha_p": _alpha(p, majorant=majorant),
        "alpha_closure": _alpha(pbar, witness=te),
        "closure_scalar": int(pbar.scalar),
    }
    cite = "example 3.8: majorization gives alpha(p) = 1; the witness t e and the limit state 0 + 1/t give alpha(closure) = t"
    claims = [
        Claim("alpha_p", 1.0, cite, "interval"),
        Claim("alpha_closure", t, cite, "interval", 1e-6),
        Claim("closure_scalar", 1, cite + " (closure scalar fixed at 1 by non-compactness, not computed)", "close", 0),
    ]
    return M, {"p": p, "closure": pbar}, {"majorant": majorant, "te": te}, measured, claims, cite


def s_prime(s: float, t: float) -> float:
    """``s'`` with ``1/s' + (1 - 1/s') / t = 1/s``."""
    if not 1 < s < t < np.inf:
        raise ValueError("need 1 < s < t < inf")
    return (1 - 1 / t) / (1 / s - 1 / t)


def _extension_witness(M, t: float) -> SeqElement:
    """``e + [[(1-1/t) q, -b q], [-b q, -(1-1/t) q]]`` with ``q = e_1 e_1^*``."""
    d = M.fiber_dim
    b = np.sqrt((1 / t) * (1 - 1 / t))
    x = np.zeros((2 * d, 2 * d), dtype=complex)
    x[0, 0] = 1 - 1 / t
    x[0, d] = x[d, 0] = -b
    x[d, d] = -(1 - 1 / t)
    return SeqElement.constant(M, x, scalar=1.0)


def _build_3_9(params, trunc, fiber_dim):
    s = float(params.get("s", 1.5))
    t = float(params.get("t", 4.0))
    sp = s_prime(s, t)
    M = _extension_model(trunc, fiber_dim, t)
    M.check_base_support(1)
    p = _recurrent_cos_projection(M, _theta_from_s(sp), block=0, closure_scalar=1, label="open")
    a = _extension_witness(M, t)
    te = SeqElement.constant(M, np.zeros((M.op_dim, M.op_dim)), scalar=t)
    pbar = closure(p)
    floor = min(
        float(min_eig(V.conj().T @ M.fiber_operator(a.tail, a.scalar, kind) @ V))
        for kind, V in [("fiber", V) for V in p.fibers] + [("tail", V) for V in p.tail]
    )
    measured = {
        "s_prime": sp,
        "witness_norm": a.norm(),
        "pap_over_p": floor,
        "alpha_p": _alpha(p, witness=a.scaled(s)),
        "alpha_closure": _alpha(pbar, witness=te),
    }
    cite = "example 3.9: s' solves 1/s' + (1 - 1/s')/t = 1/s; the witness s a and the limit states give (s, t)"
    claims = [
        Claim("witness_norm", 1.0, cite, "close", 1e-10),
        Claim("pap_over_p", 1 / s, cite, "close", 1e-10),
        Claim("alpha_p", s, cite, "interval", 1e-6),
        Claim("alpha_closure", t, cite, "interval", 1e-6),
    ]
    return M, {"p": p, "closure": pbar}, {"a": a, "te": te}, measured, claims, cite


def _build_4_10a(params, trunc, fiber_dim):
    s = float(params.get("s", 2.0))
    theta = _theta_from_s(s)
    samples = int(params.get("samples", 300))
    M = default_model(trunc, fiber_dim)
    M.check_base_support(1)
    c, sn = np.cos(theta), np.sin(theta)
    e1 = M.vector(compact={0: 1})
    fibers = [e1 if n % 2 else _escape_vector(M, {0: c}, sn, M.escape_axis(n // 2 + 1)) for n in range(1, trunc + 1)]
    tail = [M.vector("tail", compact={0: 1}), _escape_vector(M, {0: c}, sn, None, kind="tail")]
    p = SeqProjection.build(M, fibers, None, tail, label="open")
    a = _diag_element(M, s * np.eye(M.fiber_dim)[0])
    rng = _rng("4.10a", params.get("seed", 0))
    measured = {
        "alpha_p": _alpha(p, witness=a),
        "alpha_closure": _alpha(closure(p), witness=a),
        "k1_constant": quasi_regularity_constant(p, rng, samples).constant,
        "k2_constant": k_regular_constant(p, 2, rng, samples // 3).constant,
        "k3_constant": k_regular_constant(p, 3, rng, samples // 3).constant,
    }
    cite = "example 4.10a: interleaving e1 makes the open projection k-regular for every k with alpha(p) = alpha(closure) = s"
    claims = [
        Claim("alpha_p", s, cite, "interval", 1e-6),
        Claim("alpha_closure", s, cite, "interval", 1e-6),
        Claim("k1_constant", 1.0, cite, "close", 1e-8),
        Claim("k2_constant", 1.0, cite, "close", 1e-8),
        Claim("k3_constant", 1.0, cite, "close", 1e-8),
    ]
    return M, {"p": p}, {"a": a}, measured, claims, cite


def _build_4_10b(params, trunc, fiber_dim):
    s = float(params.get("s", 2.0))
    theta = _theta_from_s(s)
    M = default_model(trunc, fiber_dim)
    M.check_base_support(1)
    fibers, tail = _cos_family(M, theta)
    q = SeqProjection.build(M, fibers, None, [tail], label="open")
    w = _diag_element(M, np.eye(M.fiber_dim)[0])
    rng = _rng("4.10b", params.get("seed", 0))
    reg = quasi_regularity_constant(q, rng, int(params.get("samples", 400)), witnesses=[w])
    cone = cone_regular_check(q, rng, samples=int(params.get("cone_samples", 200)))
    measured = {
        "alpha_p": _alpha(q, witness=w.scaled(s)),
        "quasi_regular_constant": reg.constant,
        "sqrt_s": float(np.sqrt(s)),
        "cone_regular": cone.passed,
        "cone_premise_samples": cone.premise_samples,
    }
    cite = "example 4.10b: the open projection of example 3.5 is cone-regular and exactly sqrt(s)-quasi-regular"
    claims = [
        Claim("alpha_p", s, cite, "interval", 1e-6),
        Claim("quasi_regular_constant", (np.sqrt(s) - 0.02, np.sqrt(s) + 1e-6), cite, "range"),
        Claim("cone_regular", True, cite, "true"),
    ]
    return M, {"p": q}, {"e1e1": w}, measured, claims, cite


def _alternating_m2(trunc):
    M = matrix_model(2, trunc)
    e = np.eye(2)
    fibers = [e[:, 0] if n % 2 else e[:, 1] for n in range(1, trunc + 1)]
    return M, SeqProjection.build(M, fibers, None, [e[:, 0], e[:, 1]], label="open")


def _build_4_10d(params, trunc, fiber_dim):
    M, p = _alternating_m2(trunc)
    w = SeqElement.constant(M, np.array([[1, 1], [0, 0]], dtype=complex))
    b = SeqElement.constant(M, np.array([[0, 1], [1, 0]], dtype=complex))
    rng = _rng("4.10d", params.get("seed", 0))
    reg = quasi_regularity_constant(p, rng, int(params.get("samples", 400)), witnesses=[w])
    zero = zero_regular_check(p, rng, witnesses=[b])
    zero_sampled = zero_regular_check(p, rng)
    measured = {
        "quasi_regular_constant": reg.constant,
        "zero_regular_witness_fails": not zero.passed,
        "zero_regular_sampled_fails": not zero_sampled.passed,
        "closure_is_unit": closure(p).infinity.shape[1] == 2,
    }
    cite = "example 4.10d: alternating e1, e2 in c ⊗ M_2 is sqrt(2)-quasi-regular but not 0-regular"
    claims = [
        Claim("quasi_regular_constant", (np.sqrt(2) - 0.02, np.sqrt(2) + 1e-6), cite, "range"),
        Claim("zero_regular_witness_fails", True, cite, "true"),
        Claim("zero_regular_sampled_fails", True, cite, "true"),
        Claim("closure_is_unit", True, cite, "true"),
    ]
    return M, {"p": p}, {"ratio": w, "b": b}, measured, claims, cite


def _w1_grid(t: float, n_tau: int = 9, n_psi: int = 16):
    """Unit vectors ``(sqrt(1 - tau^2), tau e^{i psi})`` with ``tau <= t``."""
    out = []
    for tau in np.linspace(0.0, t, n_tau):
        for psi in (np.arange(n_psi) * 2 * np.pi / n_psi if tau > 0 else [0.0]):
            out.append(np.array([np.sqrt(1 - tau * tau), tau * np.exp(1j * psi)]))
    return out


def _build_4_13(variant: str, params, trunc):
    s = float(params.get("s", 2.0))
    if not 1 < s < np.inf:
        raise ValueError("s must lie in (1, inf)")
    t = np.sqrt(1 - 1 / s)
    n_far = 1 if variant == "a" else 0
    M = SeqModel(fiber_dim=2, trunc_len=trunc, n_far=n_far, n_fresh=n_far)
    grid = _w1_grid(t)
    fibers = [M.vector(compact={0: u[0], 1: u[1]}) for u in grid[:trunc]]
    tail = [M.vector("tail", compact={0: u[0], 1: u[1]}) for u in grid]
    if variant == "a":
        tail.append(M.vector("tail", compact={0: np.sqrt(1 - t * t)}, fresh={0: t}))
    p = SeqProjection.build(M, fibers, None, tail, total=True, label="open")
    e1, e2 = np.eye(2)
    witness_K = rank_one_element(M, e2)
    rng = _rng("4.13" + variant, params.get("seed", 0))
    reg = quasi_regularity_constant(p, rng, int(params.get("samples", 400)), witnesses=[witness_K])
    K = 1 / t
    measured = {"t": t, "K_expected": K, "quasi_regular_constant": reg.constant}
    if variant == "a":
        measured["alpha_p"] = _alpha(p, witness=rank_one_element(M, np.sqrt(s) * e1))
        measured["alpha_closure"] = _alpha(closure(p))
        cite = "example 4.13a: a dense family in W1 is K-quasi-regular with K^2 = s/(s-1), alpha(p) = s, alpha(closure) infinite"
        claims = [
            Claim("quasi_regular_constant", K, cite, "close", 0.02),
            Claim("alpha_p", s, cite, "interval", 1e-6),
            Claim("alpha_closure", np.inf, cite, "interval"),
        ]
    else:
        unit = SeqElement.constant(M, np.eye(2))
        measured["alpha_p"] = _alpha(p, majorant=unit)
        measured["alpha_closure"] = _alpha(closure(p), majorant=unit)
        cite = "example 4.13b: the same family in c ⊗ M_2 has alpha = 1 on both sides and is K- but not K'-quasi-regular"
        claims = [
            Claim("quasi_regular_constant", K, cite, "close", 0.02),
            Claim("alpha_p", 1.0, cite, "interval"),
            Claim("alpha_closure", 1.0, cite, "interval"),
        ]
    return M, {"p": p}, {"e2e2": witness_K}, measured, claims, cite


def _build_4_13a(params, trunc, fiber_dim):
    return _build_4_13("a", params, trunc)


def _build_4_13b(params, trunc, fiber_dim):
    return _build_4_13("b", params, trunc)


def _build_4_13c(params, trunc, fiber_dim):
    s = float(params.get("s", 1.5))
    t = float(params.get("t", 4.0))
    sp = s_prime(s, t)
    K2 = sp / (sp - 1)
    value = formula_4_11(s, np.sqrt(K2))
    measured = {"s_prime": sp, "K_squared": K2, "t_from_formula": value}
    cite = "example 4.13c: with K^2 = s'/(s'-1) the closure bound s/(s - K^2 (s-1)) equals t"
    claims = [Claim("t_from_formula", t, cite, "close", 1e-12 * max(1.0, t))]
    return None, {}, {}, measured, claims, cite


def _haar_unit_vectors(rng, k: int, count: int):
    out = []
    for _ in range(count):
        Z = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
        Q, R = np.linalg.qr(Z)
        Q = Q * (np.diag(R) / np.abs(np.diag(R)))
        out.append(Q[:, 0])
    return out


def _build_4_15b(params, trunc, fiber_dim):
    count = int(params.get("count", 64))
    cycles = int(params.get("cycles", 4))
    samples = int(params.get("samples", 200))
    rng = _rng("4.15b", params.get("seed", 0))
    M = matrix_model(2, trunc)
    # each cycle draws a fresh batch of samples
    us = _haar_unit_vectors(rng, 2, count * cycles)
    p = SeqProjection.build(M, us[:trunc], None, us, total=True, label="open")
    xi = np.zeros(4, dtype=complex)
    xi[0] = xi[3] = 2**-0.5
    big_model = SeqModel(fiber_dim=2, trunc_len=trunc, n_far=0, n_fresh=0, blocks=2)
    w2 = rank_one_element(big_model, xi)
    k1 = quasi_regularity_constant(p, rng, samples)
    k2 = k_regular_constant(p, 2, rng, samples, witnesses=[w2], refine=False)
    measured = {"k1_constant": k1.constant, "k2_constant": k2.constant}
    cite = "example 4.15b: dense rank-one projections in c ⊗ M_2 are 1-regular but not 2-regular"
    claims = [
        Claim("k1_constant", (1.0, 1.05), cite, "range"),
        Claim("k2_constant", np.sqrt(2), cite, "at_least", 1e-8),
    ]
    return M, {"p": p}, {"xi": w2}, measured, claims, cite


def _build_5_2(params, trunc, fiber_dim):
    M = default_model(trunc, fiber_dim)
    d = M.fiber_dim
    if d - trunc - 1 < 2:
        raise ModelError("fiber_dim too small for two escape axes per fiber")
    ax = lambda n: d - n
    r = 2**-0.5
    e1 = M.vector(compact={0: 1})
    p_fib = [np.stack([M.vector(compact={0: r, ax(n + 1): r}), M.vector(compact={ax(n): 1})], axis=1) for n in range(1, trunc + 1)]
    q_fib = [np.stack([e1, M.vector(compact={1: r, ax(n): r})], axis=1) for n in range(1, trunc + 1)]
    p_tail = np.stack([M.vector("tail", compact={0: r}, fresh={1: r}), M.vector("tail", fresh={0: 1})], axis=1)
    q_tail = np.stack([M.vector("tail", compact={0: 1}), M.vector("tail", compact={1: r}, fresh={0: r})], axis=1)
    p = SeqProjection.build(M, p_fib, e1, [p_tail], label="closed")
    q = SeqProjection.build(M, q_fib, e1, [q_tail], label="open")
    a = _diag_element(M, np.concatenate([[1.0, 2.0], np.zeros(d - 2)]))
    measured = {
        "alpha_q": _alpha(q, witness=a),
        "norm_p_minus_q": seq_norm_distance(p, q),
        "p_is_closed": is_closed(p),
        "q_is_closed": is_closed(q),
    }
    cite = "example 5.2: a closed p and an open q with alpha(q) = 2 at norm distance 2^(-1/2)"
    claims = [
        Claim("alpha_q", 2.0, cite, "interval", 1e-6),
        Claim("norm_p_minus_q", 2**-0.5, cite, "close", 1e-10),
        Claim("p_is_closed", True, cite, "true"),
        Claim("q_is_closed", False, cite, "true"),
    ]
    return M, {"p": p, "q": q}, {"a": a}, measured, claims, cite


def _build_6_3b(params, trunc, fiber_dim):
    theta = float(params.get("theta", np.pi / 3))
    _check_theta(theta)
    c, s = np.cos(theta), np.sin(theta)
    M = default_model(trunc, fiber_dim)
    M.check_base_support(1)
    v = [_escape_vector(M, {0: c}, s, M.escape_axis(n)) for n in range(1, trunc + 1)]
    w = [_escape_vector(M, {0: s}, -c, M.escape_axis(n)) for n in range(1, trunc + 1)]
    p1 = SeqProjection.build(M, v, None, [M.vector("tail", compact={0: c}, fresh={0: s})], label="p1")
    p2 = SeqProjection.build(M, w, None, [M.vector("tail", compact={0: s}, fresh={0: -c})], label="p2")
    e1 = np.eye(M.fiber_dim)[0]
    j = join(p1, p2)
    measured = {
        "alpha_p1": _alpha(p1, witness=_diag_element(M, e1 / c**2)),
        "alpha_p2": _alpha(p2, witness=_diag_element(M, e1 / s**2)),
        "alpha_join": _alpha(j),
        "inverse_sum": c**2 + s**2,
    }
    cite = "example 6.3b: alphas cos^-2 and sin^-2 with inverse sum 1 and an infinite alpha for the sum"
    claims = [
        Claim("alpha_p1", 1 / c**2, cite, "interval", 1e-6),
        Claim("alpha_p2", 1 / s**2, cite, "interval", 1e-6),
        Claim("alpha_join", np.inf, cite, "interval"),
        Claim("inverse_sum", 1.0, cite, "close", 1e-12),
    ]
    return M, {"p1": p1, "p2": p2, "join": j}, {}, measured, claims, cite


def _build_6_4(params, trunc, fiber_dim):
    M = default_model(trunc, fiber_dim)
    M.check_base_support(1)
    e1 = M.vector(compact={0: 1})
    e1t = M.vector("tail", compact={0: 1})
    ns = np.arange(1, trunc + 1)
    v = [M.vector(compact={0: np.sqrt(1 - 1 / n), M.escape_axis(n): n**-0.5}) for n in ns]
    p = SeqProjection.build(M, [e1] * trunc, e1, [e1t], label="p")
    q = SeqProjection.build(M, v, e1, [e1t], label="q")
    # fiberwise joins escape, so the join's tail class carries a fresh direction
    join_fib = [np.stack([e1, M.vector(compact={M.escape_axis(n): 1})], axis=1) for n in ns]
    join_tail = np.stack([e1t, M.vector("tail", fresh={0: 1})], axis=1)
    j = SeqProjection.build(M, join_fib, e1, [join_tail], label="join")
    j_open = SeqProjection.build(M, join_fib, None, [join_tail], label="join-open")
    # angle between the fibers e1 and v_n, measured from the model vectors
    angles = np.array([np.arccos(min(1.0, abs(np.vdot(e1, v[n - 1])))) for n in ns[1:]])
    K = 1 / (1 - np.cos(angles))
    measured = {
        "alpha_p": _alpha(p),
        "alpha_q": _alpha(q),
        "p_compact": is_compact_in_model(p),
        "q_compact": is_compact_in_model(q),
        "alpha_join": _alpha(j),
        "alpha_join_open": _alpha(j_open),
        "join_is_closed": is_closed(j),
        "angle_min": float(angles.min()),
        "angles_decreasing": bool(np.all(np.diff(angles) < 0)),
        "K_diverging": bool(np.all(np.diff(K) > 0) and K[-1] > 2 * trunc - 2),
        "join_fiber_check": float(max(np.linalg.norm(join(p, q).fibers[n - 1] @ join(p, q).fibers[n - 1].conj().T - join_fib[n - 1] @ join_fib[n - 1].conj().T, 2) for n in ns[1:])),
    }
    cite = "example 6.4: two compact projections at angle zero whose join has infinite alpha"
    claims = [
        Claim("alpha_p", 1.0, cite, "interval"),
        Claim("alpha_q", 1.0, cite, "interval"),
        Claim("p_compact", True, cite, "true"),
        Claim("q_compact", True, cite, "true"),
        Claim("alpha_join", np.inf, cite, "interval"),
        Claim("alpha_join_open", np.inf, cite, "interval"),
        Claim("join_is_closed", True, cite, "true"),
        Claim("angles_decreasing", True, cite, "true"),
        Claim("K_diverging", True, cite, "true"),
        Claim("join_fiber_check", 0.0, cite, "close", 1e-10),
    ]
    return M, {"p": p, "q": q, "join": j}, {}, measured, claims, cite


def _build_7_2a(params, trunc, fiber_dim):
    r = float(params.get("r", 0.8))
    if not 0 < r < 1:
        raise ValueError("r must lie in (0, 1)")
    M = default_model(trunc, fiber_dim, tail_kind="diagonal")
    d = M.fiber_dim
    # geometric unit vector; mass beyond the truncation sits on the far coordinate
    v0c = np.sqrt(1 - r * r) * r ** np.arange(d)
    far_mass = r ** (2 * d)
    v0 = M.vector(compact=v0c, far={0: np.sqrt(far_mass)})
    cols = [v0] + [M.vector(compact={M.escape_axis(n): 1}) for n in range(1, trunc + 1)]
    Q, _ = np.linalg.qr(np.stack(cols, axis=1))
    Q = Q * np.sign(np.real(np.diag(Q.conj().T @ np.stack(cols, axis=1))))
    fibers = [(v0 + Q[:, n]) / np.sqrt(2) for n in range(1, trunc + 1)]
    tail = (M.weak_limit_map().T @ v0 + M.vector("tail", fresh={0: 1})) / np.sqrt(2)
    p = SeqProjection.build(M, fibers, None, [tail], label="open")
    Pc = {kind: np.zeros(M.layout_dim(kind)) for kind in ("fiber", "tail")}
    for kind in Pc:
        Pc[kind][M.compact_index(kind)] = 1
    best = min(
        [float(np.sum(Pc["fiber"] * np.abs(v) ** 2)) for v in fibers] + [float(np.sum(Pc["tail"] * np.abs(tail) ** 2))]
    )
    measured = {
        "far_mass": far_mass,
        "alpha_p": _alpha(p),
        "best_margin": 0.5 - best,
        "model_alpha": 2 / (1 - far_mass),
    }
    cite = "example 7.2a: with a diagonal limit the vectors (v0 + f_n)/sqrt 2 give alpha(p) = 2, never attained"
    claims = [
        Claim("alpha_p", 2.0, cite, "interval", 1e-6),
        Claim("best_margin", 0.0, cite, "at_least", 0.0),
    ]
    return M, {"p": p}, {}, measured, claims, cite


def _build_7_2b(params, trunc, fiber_dim):
    M = default_model(trunc, fiber_dim)
    d = M.fiber_dim
    dk = np.concatenate([[1.0], 1.0 / (2 * np.arange(2, d + 1))])

    def v(k, kind="fiber"):
        c1 = np.sqrt((0.5 - dk[k - 1]) / (1 - dk[k - 1]))
        ck = np.sqrt(0.5 / (1 - dk[k - 1]))
        return M.vector(kind, compact={0: c1, k - 1: ck})

    fibers = [v(m + 1) for m in diagonal_enumeration(trunc)]
    tail = [v(k, "tail") for k in range(2, d + 1)] + [M.vector("tail", compact={0: 2**-0.5}, fresh={0: 2**-0.5})]
    p = SeqProjection.build(M, fibers, None, tail, label="open")
    a0 = _diag_element(M, dk)
    floor = min(
        float(min_eig(V.conj().T @ M.fiber_operator(a0.tail, 0.0, kind) @ V))
        for kind, V in [("fiber", V) for V in p.fibers] + [("tail", V) for V in p.tail]
    )
    budgets = sorted({R for R in (1, 2, 4, 8, 16, 32, d - 1) if R < d})
    margins = {}
    for R in budgets:
        q = np.diag(np.concatenate([np.ones(R), np.zeros(d - R)]))
        margins[str(R)] = min(
            float(min_eig(V.conj().T @ M.fiber_operator(q, 0.0, kind) @ V)) - 0.5
            for kind, V in [("fiber", V) for V in p.fibers] + [("tail", V) for V in p.tail]
        )
    measured = {
        "alpha_p": _alpha(p, witness=a0.scaled(2.0)),
        "witness_norm": a0.norm(),
        "pap_floor": floor,
        "rank_budget_margins": margins,
        "all_budgets_fail": all(m < 0 for m in margins.values()),
    }
    cite = "example 7.2b: the witness a0 attains alpha(p) = 2, but no finite-rank cut achieves pqp >= p/2"
    claims = [
        Claim("alpha_p", 2.0, cite, "interval", 1e-6),
        Claim("witness_norm", 1.0, cite, "close", 1e-12),
        Claim("pap_floor", 0.5, cite, "close", 1e-10),
        Claim("all_budgets_fail", True, cite, "true"),
    ]
    return M, {"p": p}, {"a0": a0}, measured, claims, cite


def minimal_lambda3(lam1: float, lam2: float) -> float:
    """Least ``mu = -lambda_3`` with ``diag(lam1, 0) >= lam2 P_+ + lambda_3 P_-`` on the 2x2 reduction.

    ``P_+`` and ``P_-`` project onto ``(1, 1)/sqrt 2`` and ``(1, -1)/sqrt 2``.
    Found by root-finding on the least eigenvalue of the difference.
    """
    if not lam1 > 2 * lam2 > 0:
        raise ValueError("need lambda_1 > 2 lambda_2 > 0")
    Pp = 0.5 * np.array([[1.0, 1.0], [1.0, 1.0]])
    Pm = 0.5 * np.array([[1.0, -1.0], [-1.0, 1.0]])
    diff = lambda mu: float(np.linalg.eigvalsh(np.diag([lam1, 0.0]) - lam2 * Pp + mu * Pm)[0])
    hi = lam2
    while diff(hi) < 0:
        hi *= 2
    return float(brentq(diff, lam2 / 2 if diff(lam2 / 2) < 0 else 0.0, hi, xtol=1e-14, rtol=1e-15))


def _build_8_5(params, trunc, fiber_dim):
    lam1 = float(params.get("lambda1", 3.0))
    lam2 = float(params.get("lambda2", 1.0))
    mu = minimal_lambda3(lam1, lam2)
    M = default_model(trunc, fiber_dim)
    M.check_base_support(1)
    fibers, tail = _cos_family(M, np.pi / 4)
    e1 = M.vector(compact={0: 1})
    p = SeqProjection.build(M, fibers, e1, [tail], label="closed")
    a = _diag_element(M, 2 * np.eye(M.fiber_dim)[0])
    # k_m >= h_n on the span of e1 and the fiber's escape axis, for every explicit fiber past m
    m = trunc // 2
    lam3 = -mu * (1 + 1e-9)
    worst = np.inf
    for n in range(m, trunc + 1):
        ax = M.escape_axis(n)
        idx = [0, ax]
        k = np.zeros(M.fiber_dim)
        k[0] = lam1
        k[M.escape_axis(trunc):M.escape_axis(1) + 1] = 0.0
        vn = fibers[n - 1][: M.fiber_dim]
        P = np.outer(vn, vn.conj())
        h = lam2 * P + lam3 * (np.eye(M.fiber_dim) - P)
        worst = min(worst, float(min_eig((np.diag(k) - h)[np.ix_(idx, idx)])))
    measured = {
        "minimal_abs_lambda3": mu,
        "reduction_margin": worst,
        "alpha_p": _alpha(p, witness=a),
        "alpha_bound_from_spectrum": lam1 / lam2,
    }
    cite = "example 8.5: the closed projection of example 3.5 at theta = pi/4 has alpha 2; large |lambda3| makes the reduction hold"
    claims = [
        Claim("alpha_p", 2.0, cite, "interval", 1e-6),
        Claim("reduction_margin", 0.0, cite, "at_least", 1e-9),
        Claim("alpha_bound_from_spectrum", 2.0, cite, "at_least", 0.0),
    ]
    return M, {"p": p}, {"a": a}, measured, claims, cite


CATALOG = {
    "3.2": (_build_3_2, "clopen and central projections: both alphas 1 or both infinite"),
    "3.3": (_build_3_3, "pair (1, 1)"),
    "3.4": (_build_3_4, "pair (inf, inf)"),
    "3.5": (_build_3_5, "pair (s, s), closed and open"),
    "3.6": (_build_3_6, "pair (s, inf)"),
    "3.7": (_build_3_7, "pair (1, inf)"),
    "3.8": (_build_3_8, "pair (1, t) in a scalar extension"),
    "3.9": (_build_3_9, "pair (s, t) in a scalar extension"),
    "4.10a": (_build_4_10a, "k-regular open projection"),
    "4.10b": (_build_4_10b, "cone-regular, sqrt(s)-quasi-regular"),
    "4.10d": (_build_4_10d, "sqrt(2)-quasi-regular, not 0-regular"),
    "4.13a": (_build_4_13a, "K-quasi-regular with infinite closure alpha"),
    "4.13b": (_build_4_13b, "K-quasi-regular in c ⊗ M_2"),
    "4.13c": (_build_4_13c, "closure bound reproduces t"),
    "4.15b": (_build_4_15b, "1-regular but not 2-regular"),
    "5.2": (_build_5_2, "closed p near open q"),
    "6.3b": (_build_6_3b, "inverse alphas summing to 1 with infinite join"),
    "6.4": (_build_6_4, "zero angle, infinite join"),
    "7.2a": (_build_7_2a, "alpha not attained"),
    "7.2b": (_build_7_2b, "alpha attained, distance not attained"),
    "8.5": (_build_8_5, "spectral projection bound is sharp"),
}

# Parameters each builder accepts; anything else is rejected.
PARAMS = {
    "3.2": (),
    "3.3": ("k",),
    "3.4": (),
    "3.5": ("theta",),
    "3.6": ("s",),
    "3.7": (),
    "3.8": ("t",),
    "3.9": ("s", "t"),
    "4.10a": ("s", "samples", "seed"),
    "4.10b": ("s", "samples", "cone_samples", "seed"),
    "4.10d": ("samples", "seed"),
    "4.13a": ("s", "samples", "seed"),
    "4.13b": ("s", "samples", "seed"),
    "4.13c": ("s", "t"),
    "4.15b": ("count", "cycles", "samples", "seed"),
    "5.2": (),
    "6.3b": ("theta",),
    "6.4": (),
    "7.2a": ("r",),
    "7.2b": (),
    "8.5": ("lambda1", "lambda2"),
}

# Smaller default truncations where sampled searches run over amplified models.
_DEFAULT_TRUNC = {"4.10a": 12}


def build_example(example_id: str, params: dict | None = None, trunc: int | None = None, fiber_dim: int | None = None) -> CatalogEntry:
    """Build and measure one catalog example.

    Raises
    ------
    KeyError
        Unknown id, or an id listed in :data:`NOT_BUILT`.
    ValueError
        Parameter outside the example's range.
    ModelError
        Truncation too small or over the dimension budget.
    """
    if example_id in NOT_BUILT:
        raise KeyError(f"example {example_id} is not built: {NOT_BUILT[example_id]}")
    if example_id not in CATALOG:
        raise KeyError(f"unknown example {example_id!r}")
    params = dict(params or {})
    unknown = sorted(set(params) - set(PARAMS[example_id]))
    if unknown:
        raise ValueError(f"example {example_id} takes {list(PARAMS[example_id])}, got unknown {unknown}")
    builder, _ = CATALOG[example_id]
    N = trunc if trunc is not None else _DEFAULT_TRUNC.get(example_id, DEFAULT_TRUNC)
    M, projections, witnesses, measured, claims, cite = builder(params, N, fiber_dim)
    record = dict(params)
    record["trunc"] = N
    if M is not None:
        record["fiber_dim"] = M.fiber_dim
    return CatalogEntry(example_id, record, M, projections, witnesses, measured, claims, cite)


# property suites for the matrix lemmas ----------------------------------------------------

def lemma_3_7_check(x: float, y: float, repetitions: int = 1, tol: float = 1e-10) -> dict:
    """Check ``u u^* <= diag(x, y)`` and tightness for the lemma vector, over random phases."""
    rng = np.random.default_rng(0)
    D = np.diag([x, y])
    worst, tight = np.inf, 0.0
    for k in range(max(1, repetitions)):
        u = lemma_3_7_vector(x, y, phase=0.0 if k == 0 else float(rng.uniform(0, 2 * np.pi)))
        lam = min_eig(D - np.outer(u, u.conj()))
        worst = min(worst, lam)
        tight = max(tight, abs(lam))
    norm_u = float(np.linalg.norm(lemma_3_7_vector(x, y)))
    return {
        "pass": bool(worst >= -tol and tight <= tol and abs(norm_u - 1) <= tol),
        "min_eig": float(worst),
        "unit": norm_u,
        "u1_sq": float(abs(lemma_3_7_vector(x, y)[0]) ** 2),
        "u2_sq": float(abs(lemma_3_7_vector(x, y)[1]) ** 2),
    }


def _w1_point(t: float, direction: np.ndarray, sign: float) -> np.ndarray:
    """Point of ``W1`` with transverse part ``direction`` (``||direction|| <= t``)."""
    r = np.linalg.norm(direction)
    out = np.empty(len(direction) + 1)
    out[0] = sign * np.sqrt(max(0.0, 1 - r * r))
    out[1:] = direction
    return out


def lemma_4_12_check(t: float, dim: int, trials: int = 200, seed: int = 0, pool: int = 64, tol: float = 1e-6) -> dict:
    """Sample points of ``W`` and certify each as a convex combination of ``W1`` points.

    ``W = {||u|| <= 1, ||Qu|| <= t}`` and ``W1`` is its part on the unit
    sphere; ``Q`` removes the first coordinate.  For every sampled ``u`` the
    pool holds random ``W1`` points plus the two ``W1`` points on the line
    ``u + lambda e_1``; non-negative least squares then looks for weights
    summing to 1.  Separately, the maximizers of random linear functionals
    over ``W`` (found by SLSQP) are checked to have norm 1.
    """
    if not 0 < t <= 1 or dim < 2:
        raise ValueError("need 0 < t <= 1 and dim >= 2")
    rng = np.random.default_rng(seed)
    worst_res, worst_support, fails = 0.0, 0, 0
    for _ in range(trials):
        # uniform-ish point of W: random direction, radius, then clip the transverse part
        z = rng.standard_normal(dim)
        z *= rng.uniform() ** (1 / dim) / np.linalg.norm(z)
        rest = z[1:]
        if np.linalg.norm(rest) > t:
            rest = rest * t / np.linalg.norm(rest)
        u = np.concatenate([[z[0]], rest])
        pts = [_w1_point(t, rest, 1.0), _w1_point(t, rest, -1.0)]
        for _ in range(pool):
            g = rng.standard_normal(dim - 1)
            g *= t * rng.uniform() ** (1 / (dim - 1)) / np.linalg.norm(g)
            pts.append(_w1_point(t, g, rng.choice([-1.0, 1.0])))
        P = np.stack(pts, axis=1)
        A = np.vstack([P, np.ones((1, P.shape[1]))])
        b = np.concatenate([u, [1.0]])
        w, res = nnls(A, b)
        worst_res = max(worst_res, float(res))
        worst_support = max(worst_support, int(np.sum(w > 1e-12)))
        if res > tol:
            fails += 1
    extreme_gap = 0.0
    cons = [
        {"type": "ineq", "fun": lambda u: 1 - u @ u},
        {"type": "ineq", "fun": lambda u: t * t - u[1:] @ u[1:]},
    ]
    for _ in range(max(1, trials // 10)):
        c = rng.standard_normal(dim)
        res = minimize(lambda u: -c @ u, np.zeros(dim), method="SLSQP", constraints=cons, options={"ftol": 1e-14, "maxiter": 500})
        extreme_gap = max(extreme_gap, abs(np.linalg.norm(res.x) - 1))
    return {
        "pass": bool(fails == 0 and extreme_gap <= tol),
        "failures": fails,
        "max_residual": worst_res,
        "max_support": worst_support,
        "support_bound": dim + 1,
        "extreme_norm_gap": float(extreme_gap),
    }


def spectral_inequality_suite(trials: int = 500, seed: int = 0, dim: int = 6, lam1: float = 3.0, lam2: float = 1.0) -> dict:
    """Spectral-projection witnesses on random ``h <= a`` and the sharpness example.

    For each trial ``p = E_[eps, inf)(h)`` with ``eps`` between two
    eigenvalues of ``h``.  The check ``p <= p (a / eps) p`` certifies
    ``alpha(p) <= ||a|| / eps``; when ``h >= 0`` the stronger
    ``p <= h / eps <= a / eps`` certifies ``alpha(p) = 1``.
    """
    rng = np.random.default_rng(seed)
    fails_witness = fails_major = 0
    for k in range(trials):
        X = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        h = 0.5 * (X + X.conj().T)
        if k % 2:
            h = h @ h / dim
        Y = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        a = h + Y @ Y.conj().T / dim
        w = np.linalg.eigvalsh(h)
        pos = w[w > 1e-6]
        if len(pos) == 0:
            continue
        j = int(rng.integers(len(pos)))
        lo = pos[j - 1] if j > 0 else max(w[w <= 1e-6].max(initial=0.0), 0.0)
        eps = 0.5 * (lo + pos[j]) if j > 0 else 0.5 * pos[0] + 0.5 * max(lo, 0.0)
        p = spectral_projection(h, eps, np.inf, DEFAULT_TOL)
        if not psd_geq(p @ (a / eps) @ p, p, 1e-9):
            fails_witness += 1
        if k % 2 and not (psd_geq(h / eps, p, 1e-9) and psd_geq(a / eps, h / eps, 1e-9)):
            fails_major += 1
    mu = minimal_lambda3(lam1, lam2)
    entry = build_example("8.5", {"lambda1": lam1, "lambda2": lam2}, trunc=8, fiber_dim=12)
    return {
        "pass": bool(fails_witness == 0 and fails_major == 0 and entry.passed),
        "witness_failures": fails_witness,
        "majorization_failures": fails_major,
        "trials": trials,
        "minimal_abs_lambda3": mu,
        "alpha_p": entry.measured["alpha_p"],
    }


# achievable pairs ----------------------------------------------------------------------

def _pair_construction(s: float, t: float):
    if s > t:
        return None
    if s == 1 and t == 1:
        return "3.3", {}
    if np.isinf(s):
        return "3.4", {}
    if s == t:
        return "3.5", {"theta": float(np.arccos(s**-0.5))}
    if s == 1 and np.isinf(t):
        return "3.7", {}
    if np.isinf(t):
        return "3.6", {"s": s}
    if s == 1:
        return "3.8", {"t": t}
    return "3.9", {"s": s, "t": t}


def achievable_pairs_table(s_grid, t_grid, trunc: int = DEFAULT_TRUNC, fiber_dim: int | None = None) -> list[dict]:
    """Measured ``(alpha(p), alpha(closure))`` for each cell ``1 <= s <= t <= inf``.

    Cells with ``s > t`` are skipped.  A failure to build (for instance the
    dimension budget) flags the cell instead of aborting.
    """
    rows = []
    for s in s_grid:
        for t in t_grid:
            choice = _pair_construction(float(s), float(t))
            if choice is None:
                continue
            eid, params = choice
            row = {"s": float(s), "t": float(t), "construction": eid}
            try:
                entry = build_example(eid, params, trunc=trunc, fiber_dim=fiber_dim)
            except (ModelError, ValueError) as exc:
                row.update({"pass": False, "error": str(exc)})
                rows.append(row)
                continue
            m = entry.measured
            ap = m.get("alpha_p", m.get("alpha_q"))
            ac = m.get("alpha_closure", ap if eid == "3.5" else None)
            if eid == "3.5":
                ac = m["alpha_p"]
                ap = m["alpha_q"]
            row.update(
                {
                    "alpha_p": [ap["lower"], ap["upper"]],
                    "alpha_closure": [ac["lower"], ac["upper"]],
                    "pass": bool(_contains(ap, s) and _contains(ac, t)),
                }
            )
            rows.append(row)
    return rows


def _contains(interval: dict, value: float, tol: float = 1e-6) -> bool:
    if np.isinf(value):
        return bool(np.isinf(interval["lower"]))
    return bool(interval["lower"] - tol <= value <= interval["upper"] + tol and interval["upper"] - interval["lower"] <= WIDTH_LIMIT)
