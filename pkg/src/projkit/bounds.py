"""Bounds on ``alpha(p_1 v p_2)`` from the angle and the two alphas.

Two regimes are covered, with ``c_j = cos(theta_j)``, ``s_j = sin(theta_j)``
and ``alpha(p_j) = sec^2(theta_j)``:

* case I: any projections with ``angle(p_1, p_2) = theta`` and
  ``theta_1 + theta_2 < theta``;
* case II: closed projections with ``p_1 ∧ p_2 = 0``, where a sharper bound
  holds with two branches split at ``cos(theta) = s_1 s_2 / (1 + c_1 c_2)``.

Each closed form is the value of a small constrained minimum problem over
limits of vector states.  The oracles here solve those problems directly by
a dense grid followed by local polishing, without using the closed forms.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize, minimize_scalar

__all__ = [
    "DegenerateBoundWarning",
    "JoinBoundResult",
    "closed_form_I",
    "closed_form_II",
    "branch_threshold",
    "oracle_min_I",
    "oracle_min_II",
    "OracleResult",
    "compare",
    "default_grid",
    "disjoint_sum_bounds",
    "SharpnessWitness",
    "sharpness_witness",
    "maximin_cap_distance",
]

MIN_THETA = 1e-4


class DegenerateBoundWarning(UserWarning):
    """The case I hypothesis ``theta_1 + theta_2 < theta`` fails; the bound is 0."""


def _check_angles(theta: float, theta1: float, theta2: float):
    if not MIN_THETA <= theta <= np.pi / 2 + 1e-15:
        raise ValueError(f"theta must lie in [{MIN_THETA}, pi/2], got {theta!r}")
    for th in (theta1, theta2):
        if not 0.0 <= th < np.pi / 2:
            raise ValueError(f"theta_j must lie in [0, pi/2), got {th!r}")


def _trig(theta, theta1, theta2):
    # sin(pi/2 - theta) is exactly 0 at the right angle, where cos(pi/2) is not
    c = np.sin(np.pi / 2 - theta)
    return c, np.sin(theta), np.cos(theta1), np.sin(theta1), np.cos(theta2), np.sin(theta2)


def closed_form_I(theta: float, theta1: float, theta2: float) -> float:
    """Case I lower bound ``(S - sqrt T) / (2 sin^2 theta)`` on ``alpha(p_1 v p_2)^{-1}``.

    Returns 0 with a :class:`DegenerateBoundWarning` when
    ``theta_1 + theta_2 >= theta``.
    """
    _check_angles(theta, theta1, theta2)
    if theta1 + theta2 >= theta:
        warnings.warn("theta_1 + theta_2 >= theta: case I gives no finite bound", DegenerateBoundWarning, stacklevel=2)
        return 0.0
    c, s, c1, s1, c2, s2 = _trig(theta, theta1, theta2)
    q = c1**2 + c2**2
    S = q - 2 * c**2 - 2 * c * s1 * s2
    # the discriminant is a perfect square; taking the root directly avoids
    # cancellation when both theta_j are small
    root_T = s1**2 + s2**2 + 2 * c * s1 * s2
    return float((S - root_T) / (2 * s**2))


def branch_threshold(theta1: float, theta2: float) -> float:
    """Value of ``cos(theta)`` where case II switches branch."""
    c1, s1, c2, s2 = np.cos(theta1), np.sin(theta1), np.cos(theta2), np.sin(theta2)
    return float(s1 * s2 / (1 + c1 * c2))


def closed_form_II(theta: float, theta1: float, theta2: float) -> tuple[float, str]:
    """Case II lower bound on ``alpha(p_1 v p_2)^{-1}`` and the branch used (``"a"`` or ``"b"``)."""
    _check_angles(theta, theta1, theta2)
    c, s, c1, s1, c2, s2 = _trig(theta, theta1, theta2)
    if c <= branch_threshold(theta1, theta2):
        q = c1**2 + c2**2
        S = q + 2 * c**2 * c1 * c2
        root_T = (c1 + c2) * np.sqrt((c1 - c2) ** 2 + 4 * c1 * c2 * c**2)
        return float((S - root_T) / (2 * s**2)), "a"
    num = c1**2 * c2**2 * s**2
    den = c1**2 + c2**2 - c1**2 * c2**2 * (1 + c**2) + 2 * c * c1 * c2 * s1 * s2
    return float(num / den), "b"


# oracles ---------------------------------------------------------------

@dataclass(frozen=True)
class OracleResult:
    """Minimum of a join problem and where it was attained.

    ``value`` is clipped at 0, since a bound on ``alpha^{-1}`` below 0 carries
    no information; ``raw`` keeps the unclipped minimum.
    """

    value: float
    raw: float
    argmin: dict
    grid_value: float
    resolution: int


def _ratio(a11, a12, a22, x, phi):
    cphi, sphi = np.cos(phi), np.sin(phi)
    num = a11 * cphi**2 + 2 * a12 * cphi * sphi + a22 * sphi**2
    den = 1.0 + 2 * x * cphi * sphi
    return num / den


def oracle_min_I(theta: float, theta1: float, theta2: float, resolution: int = 64) -> OracleResult:
    """Minimize ``c_1^2 s^2 + 2 y s t + c_2^2 t^2`` subject to the case I constraints.

    Constraints: ``s^2 + 2 x s t + t^2 = 1``, ``s, t >= 0``,
    ``|x| <= cos theta`` and ``|x - y| <= s_1 s_2``.  The pair ``(s, t)`` is
    written as ``(cos phi, sin phi)`` rescaled onto the constraint curve, so
    the objective becomes a ratio of two quadratic forms in ``phi``.  A grid
    over ``(x, y - x, phi)`` is followed by L-BFGS-B from the best cells.
    """
    _check_angles(theta, theta1, theta2)
    c, _, c1, s1, c2, s2 = _trig(theta, theta1, theta2)
    w = s1 * s2
    xs = np.linspace(-c, c, resolution + 1)
    ds = np.linspace(-w, w, max(2, resolution // 4) + 1)
    phis = np.linspace(0.0, np.pi / 2, 8 * resolution + 1)
    X, D, P = np.meshgrid(xs, ds, phis, indexing="ij")
    vals = _ratio(c1**2, X + D, c2**2, X, P)
    flat = np.argsort(vals, axis=None)[:8]
    grid_best = float(vals.reshape(-1)[flat[0]])

    def f(z):
        return float(_ratio(c1**2, z[0] + z[1], c2**2, z[0], z[2]))

    bounds = [(-c, c), (-w, w), (0.0, np.pi / 2)]
    best, arg = grid_best, None
    for k in flat:
        i, j, l = np.unravel_index(k, vals.shape)
        z0 = np.array([xs[i], ds[j], phis[l]])
        res = minimize(f, z0, method="L-BFGS-B", bounds=bounds, options={"ftol": 1e-15, "gtol": 1e-12, "maxiter": 500})
        if arg is None or res.fun < best:
            best, arg = float(res.fun), res.x
    x, d, phi = arg
    scale = 1.0 / np.sqrt(1.0 + 2 * x * np.cos(phi) * np.sin(phi))
    argmin = {"x": float(x), "y": float(x + d), "s": float(scale * np.cos(phi)), "t": float(scale * np.sin(phi))}
    return OracleResult(max(best, 0.0), best, argmin, grid_best, resolution)


def oracle_min_II(theta: float, theta1: float, theta2: float, resolution: int = 32) -> OracleResult:
    """Minimize ``delta_1 s^2 + 2 y s t + delta_2 t^2`` subject to the case II constraints.

    Constraints: ``s^2 + 2 x s t + t^2 = 1``, ``s, t >= 0``,
    ``|x| <= cos theta``, ``|y| <= sqrt(delta_1 delta_2) cos theta``,
    ``|x - y| <= sqrt((1 - delta_1)(1 - delta_2))`` and
    ``cos^2 theta_j <= delta_j <= 1``.  ``y`` is written as
    ``x + w sqrt((1 - delta_1)(1 - delta_2))`` with ``|w| <= 1``, which keeps
    the feasible set full-dimensional when some ``theta_j = 0`` forces
    ``y = x``.  The grid masks infeasible cells and the best cells are
    polished with SLSQP.  ``argmin`` reports the ``delta_j`` at the minimum.
    """
    _check_angles(theta, theta1, theta2)
    c, _, c1, s1, c2, s2 = _trig(theta, theta1, theta2)
    nd = max(3, resolution // 4)
    d1s = np.linspace(c1**2, 1.0, nd)
    d2s = np.linspace(c2**2, 1.0, nd)
    ws = np.linspace(-1.0, 1.0, resolution + 1)
    xs = np.linspace(-c, c, resolution + 1)
    phis = np.linspace(0.0, np.pi / 2, 4 * resolution + 1)
    D1, D2, W, X, P = np.meshgrid(d1s, d2s, ws, xs, phis, indexing="ij", sparse=True)
    Y = X + W * np.sqrt((1 - D1) * (1 - D2))
    feasible = np.abs(Y) <= np.sqrt(D1 * D2) * c + 1e-15
    vals = np.where(feasible, _ratio(D1, Y, D2, X, P), np.inf)
    flat = np.argsort(vals, axis=None)[:8]
    grid_best = float(vals.reshape(-1)[flat[0]])
    grids = (d1s, d2s, ws, xs, phis)

    def unpack(z):
        d1, d2, w, x, phi = z
        return d1, d2, x + w * np.sqrt(max((1 - d1) * (1 - d2), 0.0)), x, phi

    def f(z):
        d1, d2, y, x, phi = unpack(z)
        return float(_ratio(d1, y, d2, x, phi))

    def slack(z, sgn):
        d1, d2, y, _, _ = unpack(z)
        return np.sqrt(max(d1 * d2, 0.0)) * c - sgn * y

    cons = [{"type": "ineq", "fun": lambda z, sgn=sgn: slack(z, sgn)} for sgn in (1, -1)]
    bounds = [(c1**2, 1.0), (c2**2, 1.0), (-1.0, 1.0), (-c, c), (0.0, np.pi / 2)]
    best, arg = grid_best, None
    for k in flat:
        idx = np.unravel_index(k, vals.shape)
        z0 = np.array([g[i] for g, i in zip(grids, idx)])
        if arg is None:
            arg = z0
        res = minimize(f, z0, method="SLSQP", bounds=bounds, constraints=cons, options={"ftol": 1e-15, "maxiter": 500})
        z = np.clip(res.x, [b[0] for b in bounds], [b[1] for b in bounds])
        if min(slack(z, 1), slack(z, -1)) >= -1e-10 and f(z) < best:
            best, arg = f(z), z
    d1, d2, y, x, phi = unpack(arg)
    scale = 1.0 / np.sqrt(1.0 + 2 * x * np.cos(phi) * np.sin(phi))
    argmin = {
        "delta1": float(d1),
        "delta2": float(d2),
        "x": float(x),
        "y": float(y),
        "s": float(scale * np.cos(phi)),
        "t": float(scale * np.sin(phi)),
        "delta_step": float(max(d1s[1] - d1s[0], d2s[1] - d2s[0])) if nd > 1 else 0.0,
    }
    return OracleResult(max(best, 0.0), best, argmin, grid_best, resolution)


@dataclass(frozen=True)
class JoinBoundResult:
    """Closed form against oracle for one parameter triple."""

    case: str
    theta: float
    theta1: float
    theta2: float
    closed_form: float
    oracle_min: float
    branch: str
    gap: float
    argmin: dict = field(default_factory=dict)

    def row(self) -> dict:
        return {
            "case": self.case,
            "theta": self.theta,
            "theta1": self.theta1,
            "theta2": self.theta2,
            "closed_form": self.closed_form,
            "oracle_min": self.oracle_min,
            "gap": self.gap,
            "branch": self.branch,
        }


def default_grid():
    """The 27 triples ``theta in {0.4, 0.8, 1.2}``, ``theta_j in {0, 0.15, 0.3}``."""
    return [(t, a, b) for t in (0.4, 0.8, 1.2) for a in (0.0, 0.15, 0.3) for b in (0.0, 0.15, 0.3)]


def compare(case: str, theta: float, theta1: float, theta2: float, resolution: int | None = None) -> JoinBoundResult:
    """Closed form and oracle minimum for one triple."""
    if case == "I":
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DegenerateBoundWarning)
            cf = closed_form_I(theta, theta1, theta2)
        orc = oracle_min_I(theta, theta1, theta2, resolution or 64)
        branch = "I" if theta1 + theta2 < theta else "I-degenerate"
    elif case == "II":
        cf, b = closed_form_II(theta, theta1, theta2)
        orc = oracle_min_II(theta, theta1, theta2, resolution or 32)
        branch = f"II({b})"
    else:
        raise ValueError(f"unknown case {case!r}")
    return JoinBoundResult(case, theta, theta1, theta2, cf, orc.value, branch, abs(cf - orc.value), orc.argmin)


def disjoint_sum_bounds(alpha1: float, alpha2: float, closed_sigma_unital: bool = False) -> dict:
    """Bounds for ``alpha(p_1 + p_2)`` when ``p_1 p_2 = 0``.

    ``lower_inverse`` is ``max(0, 1/alpha_1 + 1/alpha_2 - 1)``, a lower bound on
    ``alpha(p_1 + p_2)^{-1}`` that always holds.  ``exact`` is
    ``max(alpha_1, alpha_2)`` and is only reported when the caller asserts
    both projections are closed in a sigma-unital algebra.
    """
    for a in (alpha1, alpha2):
        if not a >= 1.0:
            raise ValueError(f"alpha must be at least 1, got {a!r}")
    inv = lambda a: 0.0 if np.isinf(a) else 1.0 / a
    lower = max(0.0, inv(alpha1) + inv(alpha2) - 1.0)
    return {
        "lower_inverse": lower,
        "alpha_upper": np.inf if lower == 0.0 else 1.0 / lower,
        "exact": max(alpha1, alpha2) if closed_sigma_unital else None,
    }


# sharpness witnesses -----------------------------------------------------

@dataclass
class SharpnessWitness:
    """Model realizing a join bound, with measured quantities."""

    case: str
    params: dict
    model: object
    p1: object
    p2: object
    join: object
    interleaved: tuple
    measured: dict


def _gram_vectors(G: np.ndarray) -> np.ndarray:
    """Columns with Gram matrix ``G`` (PSD), via the eigen-decomposition."""
    w, U = np.linalg.eigh(G)
    if w[0] < -1e-10:
        raise ValueError("Gram matrix is not positive semidefinite: invalid parameter combination")
    return (U * np.sqrt(np.clip(w, 0.0, None))).conj().T


def _minimizer(case, theta, theta1, theta2):
    c, _, c1, s1, c2, s2 = _trig(theta, theta1, theta2)
    if case == "I":
        x = -c
        return c1**2, c2**2, x, x - s1 * s2
    d1, d2 = c1**2, c2**2
    y = -c1 * c2 * c
    w = s1 * s2
    x = y + w if y + w <= c else c
    return d1, d2, x, y


def sharpness_witness(case: str, theta: float, theta1: float, theta2: float, n_tail: int = 8) -> SharpnessWitness:
    """Build closed projections ``p^1, p^2`` whose join realizes the case bound.

    Vectors ``u^j`` (norm ``sqrt(delta_j)``, inner product ``y``) sit in two
    compact coordinates; escaping parts ``w^j`` (norm ``sqrt(1 - delta_j)``,
    inner product ``x - y``) use two escape axes per explicit fiber and two
    shared fresh coordinates in the tail.  The tail fibers are
    ``u^j + w^j``.  The state-limit value of the join's tail class is the
    generalized eigenvalue of the two Gram matrices; the quadratic form at
    the minimizing ``(s, t)`` is reported alongside it.

    The interleaved variant has period-3 tail classes: the closed tail, the
    normalized ``u^j`` and zero, giving disjoint open projections with the
    same join bound.
    """
    from .seqmodel import SeqModel, SeqProjection, alpha_state_limit, join, seq_angle

    _check_angles(theta, theta1, theta2)
    if case == "I" and theta1 + theta2 > theta + 1e-12:
        raise ValueError("case I witness needs theta_1 + theta_2 <= theta")
    d1, d2, x, y = _minimizer(case, theta, theta1, theta2)
    Gu = np.array([[d1, y], [y, d2]])
    Gw = np.array([[1 - d1, x - y], [x - y, 1 - d2]])
    U = _gram_vectors(Gu)
    Wv = _gram_vectors(Gw)
    N = n_tail
    M = SeqModel(fiber_dim=2 + 2 * N + 2, trunc_len=N, n_far=1, n_fresh=2)

    def fiber_vec(j, n):
        v = np.zeros(M.fiber_dim_total, dtype=complex)
        v[:2] = U[:, j]
        a1, a2 = M.fiber_dim - 2 * n, M.fiber_dim - 2 * n + 1
        v[a1], v[a2] = Wv[0, j], Wv[1, j]
        return v

    def tail_vec(j):
        return M.vector("tail", compact={0: U[0, j], 1: U[1, j]}, fresh={0: Wv[0, j], 1: Wv[1, j]})

    if case == "I":
        inf = np.zeros((M.fiber_dim_total, 2), dtype=complex)
        inf[:2, :2] = U
        inf_j = [inf, inf]
    else:
        inf_j = [M.vector(compact={0: U[0, j], 1: U[1, j]}) for j in (0, 1)]
    ps = [
        SeqProjection.build(M, [fiber_vec(j, n) for n in range(1, N + 1)], inf_j[j], [tail_vec(j)])
        for j in (0, 1)
    ]
    J = join(*ps)
    tail = J.tail[0]
    W = M.limit_weight("tail")
    C = tail.conj().T @ W @ tail
    lam = float(np.linalg.eigvalsh(0.5 * (C + C.conj().T))[0])

    B = np.array([[1.0, x], [x, 1.0]])
    A = Gu
    from scipy.linalg import eigh

    gw, gv = eigh(A, B)
    st = gv[:, 0] / np.sqrt(gv[:, 0] @ B @ gv[:, 0])
    st = st * np.sign(st[0] if st[0] != 0 else st[1])
    s_opt, t_opt = float(st[0]), float(st[1])
    v_lim = s_opt * U[:, 0] + t_opt * U[:, 1]
    phi_norm = float(np.real(np.vdot(v_lim, v_lim)))

    def unit_u(j):
        nrm = np.linalg.norm(U[:, j])
        return M.vector("tail", compact={0: U[0, j] / nrm, 1: U[1, j] / nrm}) if nrm > 0 else np.zeros(M.tail_dim)

    zero_t = np.zeros((M.tail_dim, 0))
    zero_f = np.zeros((M.fiber_dim_total, 0))
    q_proj = []
    for j in (0, 1):
        fibers = []
        for n in range(1, N + 1):
            m, r = divmod(n, 3)
            if r == 0:
                fibers.append(fiber_vec(j, max(m, 1)))
            elif r == 1 + j:
                u = np.zeros(M.fiber_dim_total, dtype=complex)
                u[:2] = U[:, j] / np.linalg.norm(U[:, j])
                fibers.append(u)
            else:
                fibers.append(zero_f)
        classes = [tail_vec(j), unit_u(j) if j == 0 else zero_t, unit_u(j) if j == 1 else zero_t]
        q_proj.append(SeqProjection.build(M, fibers, zero_f, classes))
    qJ = join(*q_proj)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateBoundWarning)
        cf = closed_form_I(theta, theta1, theta2) if case == "I" else closed_form_II(theta, theta1, theta2)[0]
    measured = {
        "angle": seq_angle(*ps),
        "alpha_p1": alpha_state_limit(ps[0]),
        "alpha_p2": alpha_state_limit(ps[1]),
        "join_state_limit": max(lam, 0.0),
        "join_alpha_lower": alpha_state_limit(J),
        "phi_norm": phi_norm,
        "closed_form": cf,
        "s": s_opt,
        "t": t_opt,
        "x": float(x),
        "y": float(y),
        "interleaved_join_alpha_lower": alpha_state_limit(qJ),
        "interleaved_alpha_q1": alpha_state_limit(q_proj[0]),
        "interleaved_alpha_q2": alpha_state_limit(q_proj[1]),
    }
    params = {"theta": theta, "theta1": theta1, "theta2": theta2, "n_tail": N}
    return SharpnessWitness(case, params, M, ps[0], ps[1], J, tuple(q_proj), measured)


# maximin ------------------------------------------------------------------

def maximin_cap_distance(u, grid: int = 4001) -> dict:
    """``d_a`` from ``p(u)`` to the closed relatively compact projections.

    Solves ``sup_{||w|| = 1} min(|(u, w)|, 2^{-1/2} |(e_1, w)|)`` twice: by a
    grid-and-Brent search over unit ``w`` in ``span(e_1, u)``, and by the
    recipe that takes ``w = e_1`` when ``(u, e_1) >= 2^{-1/2}`` and otherwise
    balances the two terms with ``w = s e_1 + t u``.  Returns both sup values
    together with the derived ``d_a`` and ``dist = sin d_a``.
    """
    u = np.asarray(u, dtype=complex).reshape(-1)
    nrm = np.linalg.norm(u)
    if abs(nrm - 1.0) > 1e-10:
        raise ValueError("u must be a unit vector")
    if abs(u[0]) > 0:
        u = u * (abs(u[0]) / u[0])
    c = float(u[0].real)
    rest = u.copy()
    rest[0] = 0.0
    r = float(np.linalg.norm(rest))
    h = 2.0**-0.5

    def g(phi):
        # w = cos(phi) e_1 + sin(phi) u_perp; (u, w) = c cos + r sin
        return min(abs(c * np.cos(phi) + r * np.sin(phi)), h * abs(np.cos(phi)))

    if r < 1e-15:
        numeric = g(0.0)
    else:
        phis = np.linspace(-np.pi / 2, np.pi / 2, grid)
        vals = np.array([g(t) for t in phis])
        k = int(np.argmax(vals))
        lo, hi = phis[max(k - 1, 0)], phis[min(k + 1, grid - 1)]
        res = minimize_scalar(lambda t: -g(t), bounds=(lo, hi), method="bounded", options={"xatol": 1e-14})
        numeric = max(float(vals[k]), float(-res.fun))
        # the max sits on a kink where the two terms cross
        cross = lambda t: abs(c * np.cos(t) + r * np.sin(t)) - h * abs(np.cos(t))
        if cross(lo) * cross(hi) < 0:
            numeric = max(numeric, g(brentq(cross, lo, hi, xtol=1e-15)))

    if c >= h:
        recipe = h
    else:
        # (u, w) = s c + t, (e_1, w) = s + t c; balance s c + t = h (s + t c)
        # w = s e_1 + t u with (s c + t) = h (s + t c)  ->  t (1 - h c) = s (h - c)
        s_, t_ = 1.0 - h * c, h - c
        norm2 = s_**2 + t_**2 + 2 * s_ * t_ * c
        s_, t_ = s_ / np.sqrt(norm2), t_ / np.sqrt(norm2)
        recipe = float(s_ * c + t_)
    d_num = float(np.arccos(min(1.0, numeric)))
    d_rec = float(np.arccos(min(1.0, recipe)))
    return {
        "inner": c,
        "numeric": float(numeric),
        "recipe": float(recipe),
        "d_a": d_rec,
        "dist": float(np.sin(d_rec)),
        "d_a_numeric": d_num,
        "disagreement": float(abs(numeric - recipe)),
    }
