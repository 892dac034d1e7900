"""Classical-quantum channels and their error-exponent calculus.

A channel maps a finite input alphabet {1, ..., k} to density operators on a
d-dimensional output space.  This module evaluates the scalar quantities the
coding bounds are made of: the Holevo mutual information, the exponent
generating function

    phi(t) = -(1 - t) * log Tr (sum_i p_i W(i)^(1-t))^(1/(1-t)),

its induced universal exponent max_t (phi(t) - t R)/(1 + t), the alternative
single-letter exponent max_t -log(sum_i p_i Tr W(i)^(1-t) W_p^t) - t R, and
the variational bound max_sigma Tr X sigma^t = (Tr X^(1/(1-t)))^(1-t) that
links the two.  Matrix powers of singular states are pseudo-powers on the
support; phi is evaluated in log space so the 1/(1-t) exponent stays stable
up to the truncated endpoint t = 1 - 1e-6.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import operators as ops
from .errors import ValidationError
from .limits import DEFAULT_ATOL, SUPPORT_CUT, check_dim

T_EDGE = 1e-6  # phi is singular at t = 1; optimize on [0, 1 - T_EDGE]
GRID_POINTS = 201
REFINE_TOL = 1e-6


@dataclass(frozen=True)
class Channel:
    """Map i -> W(i): a tuple of k density operators on C^d."""

    states: tuple

    def __post_init__(self):
        if not self.states:
            raise ValidationError("channel needs at least one output state")
        frozen = []
        d = None
        for i, w in enumerate(self.states, start=1):
            w = np.asarray(w, dtype=complex)
            try:
                ops.assert_density(w, tol=1e-8, name=f"W({i})")
            except ValueError as exc:
                raise ValidationError(str(exc)) from exc
            if d is None:
                d = w.shape[0]
            elif w.shape[0] != d:
                raise ValidationError(f"W({i}) has dimension {w.shape[0]}, expected {d}")
            frozen.append(ops.readonly(ops.hermitize(w)))
        object.__setattr__(self, "states", tuple(frozen))

    @property
    def d(self) -> int:
        return self.states[0].shape[0]

    @property
    def k(self) -> int:
        return len(self.states)


@dataclass(frozen=True)
class ExponentReport:
    """Result of a one-dimensional exponent optimization over t."""

    R: float
    t_star: float
    value: float
    curve: tuple

    @property
    def has_positive_exponent(self) -> bool:
        return self.value > 0.0


@dataclass(frozen=True)
class ExponentChainReport:
    """One-t comparison of the two exponent integrands.

    ``lhs`` is exp(t(R + r(t))) * max_sigma Tr A sigma^t and ``rhs`` is
    exp(tR) * Tr A W_p^t with A = sum_i p_i W(i)^(1-t); the ordering of the
    two exponents follows from lhs >= rhs at every t.
    """

    t: float
    R: float
    phi_t: float
    r_t: float
    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return self.lhs >= self.rhs - 1e-9


def validate_distribution(p, k: int, tol: float = DEFAULT_ATOL):
    p = tuple(float(v) for v in p)
    if len(p) != k:
        raise ValidationError(f"distribution has {len(p)} entries, channel has {k}")
    if any(v < -tol for v in p):
        raise ValidationError(f"negative probability in {p}")
    if abs(sum(p) - 1.0) > tol:
        raise ValidationError(f"probabilities sum to {sum(p):.12g}, not 1")
    return tuple(max(v, 0.0) for v in p)


def channel_output(w: Channel, x, cap: int | None = None) -> np.ndarray:
    """Tensor product output W(x_1) x ... x W(x_n)."""
    x = tuple(int(v) for v in x)
    if any(not 1 <= v <= w.k for v in x):
        raise ValueError(f"sequence symbols must lie in 1..{w.k}")
    check_dim(w.d ** len(x), cap)
    return ops.tensor_all([w.states[v - 1] for v in x], cap=cap)


def average_state(w: Channel, p) -> np.ndarray:
    """Convex mixture sum_i p_i W(i)."""
    p = validate_distribution(p, w.k)
    out = np.zeros((w.d, w.d), dtype=complex)
    for pi, wi in zip(p, w.states):
        out += pi * wi
    return ops.hermitize(out)


def mutual_information(w: Channel, p, tol: float = DEFAULT_ATOL) -> float:
    """Holevo quantity sum_i p_i Tr W(i) (log W(i) - log W_p), in nats.

    Matrix logarithms act on supports; contributions off the support of W(i)
    vanish.  A state leaking outside the support of the mixture (impossible
    for a true mixture) raises an internal consistency error.
    """
    p = validate_distribution(p, w.k)
    wp = average_state(w, p)
    mu, basis = ops.eigh(wp)
    on = mu > tol
    log_mu = np.log(mu[on])
    total = 0.0
    for pi, wi in zip(p, w.states):
        if pi <= 0.0:
            continue
        lam = np.linalg.eigvalsh(ops.hermitize(wi))
        self_term = float(sum(v * math.log(v) for v in lam if v > tol))
        diag = np.einsum("im,ij,jm->m", basis.conj(), wi, basis).real
        leak = float(diag[~on].sum())
        if leak > 1e-8:
            raise RuntimeError(f"W leaks {leak:.3e} outside the mixture support")
        cross_term = float((diag[on] * log_mu).sum())
        total += pi * (self_term - cross_term)
    return total


def _log_trace_power(a: np.ndarray, exponent: float, tol: float = SUPPORT_CUT) -> float:
    """log Tr a**exponent for PSD a, evaluated stably in log space."""
    ev = np.linalg.eigvalsh(ops.hermitize(a))
    pos = ev[ev > tol]
    if pos.size == 0:
        return -math.inf
    z = exponent * np.log(pos)
    m = float(z.max())
    return m + math.log(float(np.exp(z - m).sum()))


def phi(w: Channel, p, t: float, tol: float = SUPPORT_CUT) -> float:
    """The exponent generating function at parameter t in [0, 1 - 1e-6]."""
    if not 0.0 <= t <= 1.0 - T_EDGE:
        raise ValueError(f"t={t} outside [0, {1.0 - T_EDGE}]")
    p = validate_distribution(p, w.k)
    a = np.zeros((w.d, w.d), dtype=complex)
    for pi, wi in zip(p, w.states):
        if pi > 0.0:
            a += pi * ops.fractional_power_psd(wi, 1.0 - t, tol=tol)
    return -(1.0 - t) * _log_trace_power(a, 1.0 / (1.0 - t), tol=tol)


def _golden_max(f, lo: float, hi: float, tol: float = REFINE_TOL):
    """Golden-section maximization on [lo, hi]; returns (t, f(t))."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    best = max(((c, fc), (d, fd)), key=lambda q: q[1])
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
        cand = (c, fc) if fc >= fd else (d, fd)
        if cand[1] > best[1]:
            best = cand
    return best


def _grid_maximize(f, lo: float, hi: float, grid: int):
    ts = np.linspace(lo, hi, grid)
    vals = [f(float(t)) for t in ts]
    i = int(np.argmax(vals))
    best_t, best_v = float(ts[i]), float(vals[i])
    a = float(ts[max(i - 1, 0)])
    b = float(ts[min(i + 1, grid - 1)])
    if b > a:
        t_ref, v_ref = _golden_max(f, a, b)
        if v_ref > best_v:
            best_t, best_v = t_ref, v_ref
    curve = tuple((float(t), float(v)) for t, v in zip(ts, vals))
    return best_t, best_v, curve


def universal_exponent(w: Channel, p, R: float, grid: int = GRID_POINTS) -> ExponentReport:
    """max over t in [0, 1) of (phi(t) - t R) / (1 + t)."""
    if R < 0:
        raise ValueError("rate R must be non-negative")
    p = validate_distribution(p, w.k)

    def objective(t):
        return (phi(w, p, t) - t * R) / (1.0 + t)

    t_star, value, curve = _grid_maximize(objective, 0.0, 1.0 - T_EDGE, grid)
    return ExponentReport(R=R, t_star=t_star, value=value, curve=curve)


def hayashi_exponent(w: Channel, p, R: float, grid: int = GRID_POINTS) -> ExponentReport:
    """max over t in [0, 1] of -log(sum_i p_i Tr W(i)^(1-t) W_p^t) - t R."""
    if R < 0:
        raise ValueError("rate R must be non-negative")
    p = validate_distribution(p, w.k)
    wp = average_state(w, p)

    def objective(t):
        mixed = ops.fractional_power_psd(wp, t)
        val = 0.0
        for pi, wi in zip(p, w.states):
            if pi > 0.0:
                val += pi * ops.real_trace(ops.fractional_power_psd(wi, 1.0 - t) @ mixed)
        return -math.log(max(val, 1e-300)) - t * R

    t_star, value, curve = _grid_maximize(objective, 0.0, 1.0, grid)
    return ExponentReport(R=R, t_star=t_star, value=value, curve=curve)


def trace_power_bound(x: np.ndarray, t: float, tol: float = SUPPORT_CUT) -> float:
    """Closed form of max over densities sigma of Tr x sigma^t.

    Equals (Tr x^(1/(1-t)))^(1-t) for PSD x and 0 <= t < 1; the maximum is
    attained at sigma = x^(1/(1-t)) / Tr x^(1/(1-t)).
    """
    if not 0.0 <= t < 1.0:
        raise ValueError(f"t={t} outside [0, 1)")
    least = ops.min_eigenvalue(x)
    if least < -DEFAULT_ATOL:
        raise ValueError(f"matrix has negative eigenvalue {least:.3e}, not PSD")
    log_val = _log_trace_power(x, 1.0 / (1.0 - t), tol=tol)
    if log_val == -math.inf:
        return 0.0
    return math.exp((1.0 - t) * log_val)


def trace_power_maximizer(x: np.ndarray, t: float, tol: float = SUPPORT_CUT) -> np.ndarray:
    """The density attaining trace_power_bound(x, t)."""
    powered = ops.fractional_power_psd(x, 1.0 / (1.0 - t), tol=tol)
    tr = ops.real_trace(powered)
    if tr <= 0:
        raise ValueError("matrix has empty support")
    return powered / tr


def exponent_chain_check(w: Channel, p, R: float, t: float) -> ExponentChainReport:
    """Numerically compare the two exponent integrands at one t.

    The comparison certifies the ordering of the optimized exponents; it is
    an inequality exactly when r(t) = (phi(t) - tR)/(1 + t) is non-negative,
    which holds at the optimizing t and everywhere when R = 0.  At
    parameters with phi(t) < tR the right side can legitimately exceed the
    left.
    """
    p = validate_distribution(p, w.k)
    phi_t = phi(w, p, t)
    r_t = (phi_t - t * R) / (1.0 + t)
    a = np.zeros((w.d, w.d), dtype=complex)
    for pi, wi in zip(p, w.states):
        if pi > 0.0:
            a += pi * ops.fractional_power_psd(wi, 1.0 - t)
    lhs = math.exp(t * (R + r_t)) * trace_power_bound(a, t)
    wp = average_state(w, p)
    rhs = math.exp(t * R) * ops.real_trace(a @ ops.fractional_power_psd(wp, t))
    return ExponentChainReport(t=t, R=R, phi_t=phi_t, r_t=r_t, lhs=lhs, rhs=rhs)


def channel_to_dict(w: Channel) -> dict:
    """JSON-ready form: d, k, and k matrices of [re, im] entry pairs."""
    mats = [[[[float(z.real), float(z.imag)] for z in row] for row in wi] for wi in w.states]
    return {"d": w.d, "k": w.k, "matrices": mats}


def channel_from_dict(data: dict) -> Channel:
    for field in ("d", "k", "matrices"):
        if field not in data:
            raise ValidationError(f"channel file missing field '{field}'")
    d, k = int(data["d"]), int(data["k"])
    mats = data["matrices"]
    if len(mats) != k:
        raise ValidationError(f"expected {k} matrices, found {len(mats)}")
    states = []
    for i, mat in enumerate(mats, start=1):
        arr = np.asarray(mat, dtype=float)
        if arr.shape != (d, d, 2):
            raise ValidationError(f"matrix {i} has shape {arr.shape}, expected ({d}, {d}, 2)")
        states.append(arr[..., 0] + 1j * arr[..., 1])
    return Channel(states=tuple(states))


def load_channel(path) -> Channel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read channel file {path}: {exc}") from exc
    return channel_from_dict(data)


def save_channel(w: Channel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(channel_to_dict(w), fh, indent=2, sort_keys=True)
        fh.write("\n")
