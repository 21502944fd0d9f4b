"""Nearest relatively compact projections.

Two constructions turn a witness ``a`` with ``p <= pap`` into a nearby
projection that is relatively compact in the model:

* the spectral cut ``q = E_[eps, inf)(a)`` and ``r = range(q p)``;
* the polar-decomposition projection ``q = a^{1/2} (pap)^{-1} a^{1/2}`` for
  ``0 <= a <= 1``, optionally after the ramp ``f_delta`` kills small spectrum.

Both are computed fiber by fiber in a :class:`~projkit.seqmodel.SeqModel`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .linalg import apply_function, hermitian, projection_basis, psd_sqrt, range_basis
from .seqmodel import (
    ModelError,
    SeqElement,
    SeqProjection,
    alpha_witness,
    fiber_bases,
    is_compact_in_model,
    seq_norm_distance,
)

__all__ = [
    "dist_from_alpha",
    "d_a_from_alpha",
    "RCCandidate",
    "rc_candidate",
    "epsilon_sweep",
    "lemma_2_5_check",
    "ramp",
    "open_closed_candidate",
    "OpenClosedCandidate",
    "attainment_probe",
]


def _check_alpha(alpha: float):
    if not alpha >= 1.0:
        raise ValueError(f"alpha must be at least 1, got {alpha!r}")


def dist_from_alpha(alpha: float) -> float:
    """Distance to the relatively compact projections, ``sqrt(1 - 1/alpha)``."""
    _check_alpha(alpha)
    if np.isinf(alpha):
        return 1.0
    return float(np.sqrt(1.0 - 1.0 / alpha))


def d_a_from_alpha(alpha: float) -> float:
    """Arc-length distance ``arccos(alpha^{-1/2})``."""
    _check_alpha(alpha)
    if np.isinf(alpha):
        return float(np.pi / 2)
    return float(np.arccos(alpha ** -0.5))


def _fiber_ops(a: SeqElement, label: str, kind: str) -> np.ndarray:
    x = a.fibers[int(label[2:]) - 1] if label.startswith("n=") else a.tail
    return a.model.fiber_operator(x, a.scalar, kind)


def _map_fibers(p: SeqProjection, fn) -> SeqProjection:
    """Apply ``fn(label, kind, V) -> basis`` to every fiber class of ``p``."""
    out = {label: fn(label, kind, V) for label, kind, V in fiber_bases(p)}
    N = p.model.trunc_len
    return SeqProjection(
        p.model,
        tuple(out[f"n={n}"] for n in range(1, N + 1)),
        out["inf"],
        None if p.tail is None else tuple(out[f"tail[{g}]"] for g in range(len(p.tail))),
    )


@dataclass(frozen=True)
class RCCandidate:
    """Output of :func:`rc_candidate`."""

    r: SeqProjection
    cut: SeqProjection
    distance: float
    bound: float
    identity_residual: float
    eps: float


def _spectral_cut_basis(op: np.ndarray, eps: float, tol: Tolerances) -> np.ndarray:
    w, U = np.linalg.eigh(hermitian(op))
    if np.any(np.abs(w - eps) <= tol.spec * max(1.0, eps)):
        from .linalg import SpectralCutError

        raise SpectralCutError(f"ambiguous spectral cut at {eps!r}")
    return U[:, w >= eps]


def rc_candidate(p: SeqProjection, a: SeqElement, eps: float, tol: Tolerances = DEFAULT_TOL) -> RCCandidate:
    """Relatively compact ``r`` near ``p`` from a witness ``a`` with ``p <= pap``.

    Fiberwise ``q = E_[eps, inf)(a)`` and ``r = range(q p)``.  Since
    ``a <= ||a|| q + eps (1 - q)``, ``pqp >= (1 - eps)/||a|| p`` and therefore
    ``||p - r|| <= sqrt(1 - (1 - eps)/||a||)``.

    Raises
    ------
    WitnessRejected
        If ``a`` is not a witness for ``p``.
    SpectralCutError
        If ``eps`` lies on the spectrum of some fiber of ``a``.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    if p.model.extension is not None:
        raise ModelError("candidates are built only for models without scalar extension")
    norm_a = alpha_witness(p, a, tol)
    resid = 0.0
    cuts = {}

    def fiber_r(label, kind, V):
        nonlocal resid
        Qb = _spectral_cut_basis(_fiber_ops(a, label, kind), eps, tol)
        cuts[label] = Qb
        if V.shape[1] == 0:
            return V
        QV = Qb @ (Qb.conj().T @ V)
        R = range_basis(QV, tol)
        lhs = V.conj().T @ R @ R.conj().T @ V
        rhs = V.conj().T @ QV
        resid = max(resid, float(np.linalg.norm(lhs - rhs, 2)))
        return R

    r = _map_fibers(p, fiber_r)
    N = p.model.trunc_len
    cut = SeqProjection(
        p.model,
        tuple(cuts[f"n={n}"] for n in range(1, N + 1)),
        cuts["inf"],
        None if p.tail is None else tuple(cuts[f"tail[{g}]"] for g in range(len(p.tail))),
    )
    dist = seq_norm_distance(p, r)
    bound = float(np.sqrt(max(0.0, 1.0 - (1.0 - eps) / norm_a)))
    return RCCandidate(r, cut, dist, bound, resid, eps)


def epsilon_sweep(p: SeqProjection, a: SeqElement, n_points: int = 20, floor: float = 1e-3, tol: Tolerances = DEFAULT_TOL):
    """Run :func:`rc_candidate` over a geometric grid of cuts in ``[floor, 0.95]``.

    Cuts that land on the spectrum are skipped.  Returns the list of
    candidates in grid order.
    """
    from .linalg import SpectralCutError

    out = []
    for eps in np.geomspace(floor, 0.95, n_points):
        try:
            out.append(rc_candidate(p, a, float(eps), tol))
        except SpectralCutError:
            continue
    return out


def lemma_2_5_check(P, a, tol: float = 1e-9, floor: float = 1e-6):
    """Check ``p a^{1/2} (pap)^{-1} a^{1/2} p >= pap`` for a matrix pair.

    The inverse is taken on ``range(p)``.  Returns ``None`` when the
    preconditions ``0 <= a <= 1`` and ``pap >= floor p`` fail, otherwise the
    least eigenvalue of the difference is compared with ``-tol``.
    """
    A = hermitian(a)
    w = np.linalg.eigvalsh(A)
    if w[0] < -1e-12 or w[-1] > 1 + 1e-12:
        return None
    B = projection_basis(P)
    if B.shape[1] == 0:
        return True
    M = hermitian(B.conj().T @ A @ B)
    if np.linalg.eigvalsh(M)[0] < floor:
        return None
    S = B.conj().T @ psd_sqrt(A) @ B
    lhs = hermitian(S @ np.linalg.solve(M, S))
    return bool(np.linalg.eigvalsh(lhs - M)[0] >= -tol)


def ramp(delta: float):
    """``f_delta``: 0 on ``[0, delta]``, identity on ``[2 delta, 1]``, linear between."""
    if not 0 < delta < 0.5:
        raise ValueError("delta must lie in (0, 1/2)")

    def f(t):
        t = np.asarray(t, dtype=float)
        mid = 2.0 * (t - delta)
        return np.where(t <= delta, 0.0, np.where(t >= 2 * delta, t, mid))

    return f


@dataclass(frozen=True)
class OpenClosedCandidate:
    q: SeqProjection
    distance: float
    bound: float
    eps: float
    compression_margin: float
    support_excess: float
    compact: bool


def open_closed_candidate(
    p: SeqProjection,
    a: SeqElement,
    eps: float | None = None,
    mode: str = "closed",
    delta: float | None = None,
    tol: Tolerances = DEFAULT_TOL,
) -> OpenClosedCandidate:
    """``q = a^{1/2} (pap)^{-1} a^{1/2}`` fiberwise, for ``0 <= a <= 1``.

    In ``mode="open"`` the element is first replaced by ``f_delta(a)``
    (``delta`` defaults to ``eps/4``), which lowers the available ``eps`` by
    ``2 delta``.

    Returns the projection with ``||p - q||``, the bound ``sqrt(1 - eps)``, the
    least eigenvalue of ``pqp - pap`` on ``range(p)`` and, in open mode, how
    far ``q`` sticks out of the range of ``f_delta(a)``.
    """
    if mode not in ("open", "closed"):
        raise ValueError("mode must be 'open' or 'closed'")
    M = p.model
    if M.extension is not None:
        raise ModelError("candidates are built only for models without scalar extension")
    for X in list(a.fibers) + [a.tail]:
        w = np.linalg.eigvalsh(hermitian(X))
        if w[0] < -tol.psd or w[-1] > 1 + tol.psd:
            raise ValueError("open_closed_candidate needs 0 <= a <= 1")

    def least(elem):
        best = np.inf
        for label, kind, V in fiber_bases(p):
            if V.shape[1]:
                best = min(best, float(np.linalg.eigvalsh(hermitian(V.conj().T @ _fiber_ops(elem, label, kind) @ V))[0]))
        return best

    eps_avail = least(a)
    if eps is None:
        eps = eps_avail
    if eps > eps_avail + tol.psd or eps <= 1e-6:
        raise ValueError(f"pap >= eps p fails: least compression {eps_avail!r}, eps {eps!r}")
    b = a
    if mode == "open":
        delta = eps / 4 if delta is None else delta
        f = ramp(delta)
        b = SeqElement(M, np.stack([apply_function(x, f) for x in a.fibers]), apply_function(a.tail, f))
        eps = eps - 2 * delta
    margin = np.inf
    excess = 0.0

    def fiber_q(label, kind, V):
        nonlocal margin, excess
        if V.shape[1] == 0:
            return V
        B = _fiber_ops(b, label, kind)
        Bh = psd_sqrt(B)
        C = hermitian(V.conj().T @ B @ V)
        X = Bh @ V
        Qm = hermitian(X @ np.linalg.solve(C, X.conj().T))
        Qb = range_basis(X, tol)
        margin = min(margin, float(np.linalg.eigvalsh(hermitian(V.conj().T @ Qm @ V) - C)[0]))
        if mode == "open":
            Sb = range_basis(B, tol)
            excess = max(excess, float(np.linalg.norm(Qb - Sb @ (Sb.conj().T @ Qb), 2)) if Qb.shape[1] else 0.0)
        return Qb

    q = _map_fibers(p, fiber_q)
    return OpenClosedCandidate(
        q,
        seq_norm_distance(p, q),
        float(np.sqrt(max(0.0, 1.0 - eps))),
        float(eps),
        float(margin),
        float(excess),
        is_compact_in_model(q),
    )


def attainment_probe(example_id: str, **params) -> dict:
    """Attainment report for the catalog examples ``7.2a``, ``7.2b`` and ``trivial``.

    ``7.2a`` sweeps the truncation and reports the best witness margin
    ``1/2 - min pxp`` over ``||x|| <= 1`` with diagonal tail; it is positive
    and shrinks with the truncation.  ``7.2b`` checks the explicit witness and
    that cut-off compact candidates ``q`` of rank below the fiber dimension
    violate ``pqp >= p/2``.
    """
    from . import catalog

    if example_id == "trivial":
        M = catalog.default_model(params.get("trunc", 8), params.get("fiber_dim", 12))
        e1 = M.vector(compact={0: 1})
        p = SeqProjection.build(M, [e1] * M.trunc_len, e1, [M.vector("tail", compact={0: 1})])
        a = catalog.rank_one_element(M, np.eye(M.op_dim)[0])
        return {"alpha_attained": alpha_witness(p, a) == 1.0, "compact": is_compact_in_model(p)}
    if example_id == "7.2a":
        sizes = params.get("sizes", (8, 12, 16, 24))
        rows = []
        for N in sizes:
            entry = catalog.build_example("7.2a", {"r": params.get("r", 0.8)}, trunc=N)
            rows.append({"trunc": N, "fiber_dim": entry.model.fiber_dim, "margin": entry.measured["best_margin"]})
        margins = [r["margin"] for r in rows]
        return {
            "rows": rows,
            "margins_positive": all(m > 0 for m in margins),
            "margins_decreasing": all(b < a for a, b in zip(margins, margins[1:])),
        }
    if example_id == "7.2b":
        entry = catalog.build_example("7.2b", {}, trunc=params.get("trunc", 32))
        return {
            "witness_norm": entry.measured["witness_norm"],
            "pap_floor": entry.measured["pap_floor"],
            "rank_budget_margins": entry.measured["rank_budget_margins"],
            "all_budgets_fail": entry.measured["all_budgets_fail"],
        }
    raise ValueError(f"no attainment probe for {example_id!r}")
