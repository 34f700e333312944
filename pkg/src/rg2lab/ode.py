"""Adaptive ODE integration with event location, and multi-start Newton.

The integrator is the Dormand-Prince 5(4) embedded pair with a PI step-size
controller (Hairer, Norsett and Wanner, Solving ODEs I, section II.4). Events
are located on the discrete solution: once a step brackets a sign change the
crossing is found by Brent's method on the length of a single step taken from
the start of the bracketing step, so the reported state is a genuine RK state
and not an interpolant.
"""

import enum
import math
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "IntegratorOptions",
    "TerminationKind",
    "Termination",
    "Trajectory",
    "integrate_adaptive",
    "integrate_with_event",
    "integrate_reparametrized",
    "newton_multistart",
]

EVENT_TOL = 1e-10

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = np.zeros((7, 7))
_A[1, :1] = [1 / 5]
_A[2, :2] = [3 / 40, 9 / 40]
_A[3, :3] = [44 / 45, -56 / 15, 32 / 9]
_A[4, :4] = [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]
_A[5, :5] = [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]
_A[6, :6] = [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]
_B = _A[6].copy()
_E = np.array([
    71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40,
])


@dataclass(frozen=True)
class IntegratorOptions:
    """Tolerances and step bounds for :func:`integrate_adaptive`."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = math.inf
    initial_step: float = 1e-4
    max_steps: int = 200_000

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "max_step", "initial_step"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.rel_tol > 1e-3 or self.abs_tol > 1e-3:
            raise ValueError("rel_tol and abs_tol must not exceed 1e-3")


class TerminationKind(enum.Enum):
    REACHED_HORIZON = "horizon"
    EVENT = "event"
    STEP_SIZE_UNDERFLOW = "step_size_underflow"
    MAX_STEPS = "max_steps"


@dataclass(frozen=True)
class Termination:
    kind: TerminationKind
    time: float | None = None
    label: str | None = None

    @property
    def is_event(self):
        return self.kind is TerminationKind.EVENT


@dataclass
class Trajectory:
    """Accepted-step samples of an integration.

    ``states`` has shape ``(len(times), dim)``.
    """

    times: np.ndarray
    states: np.ndarray
    termination: Termination
    n_steps: int = 0
    n_rejected: int = 0
    extras: dict = dc_field(default_factory=dict)

    def __len__(self):
        return len(self.times)

    @property
    def final_state(self):
        return self.states[-1]

    @property
    def final_time(self):
        return float(self.times[-1])


def _as_event_map(event):
    if event is None:
        return {}
    if callable(event):
        return {"event": event}
    return dict(event)


class _Stepper:
    def __init__(self, fun, opts):
        self.fun = fun
        self.opts = opts
        self.nfev = 0

    def f(self, x, y):
        self.nfev += 1
        return np.asarray(self.fun(x, y), dtype=float)

    def step(self, x, y, h, k1):
        """One DP5 step; returns (y_new, err, k7) or None if the field failed."""
        k = np.empty((7, y.size))
        k[0] = k1
        try:
            for i in range(1, 7):
                ki = self.f(x + _C[i] * h, y + h * (_A[i, :i] @ k[:i]))
                if not np.all(np.isfinite(ki)):
                    return None
                k[i] = ki
        except (ValueError, ZeroDivisionError, FloatingPointError, OverflowError):
            return None
        # FSAL: the 7th stage is evaluated at y_new
        y_new = y + h * (_B[:6] @ k[:6])
        err = h * (_E @ k)
        return y_new, err, k[6]

    def error_norm(self, y, y_new, err):
        scale = self.opts.abs_tol + self.opts.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        return float(np.sqrt(np.mean((err / scale) ** 2)))


def _locate(stepper, x, y, k1, h, g):
    """Find the step length in (0, h] where ``g`` crosses zero."""

    def g_of(hh):
        if hh == 0.0:
            return g(x, y)
        out = stepper.step(x, y, hh, k1)
        return g(x + hh, out[0])

    g0 = g_of(0.0)
    g1 = g_of(h)
    if g1 == 0.0:
        return h
    if np.sign(g0) == np.sign(g1):
        return None
    hs = brentq(g_of, 0.0, h, xtol=4e-16 * max(abs(x), abs(h), 1e-300), rtol=1e-15, maxiter=200)
    # keep the located point on the far side of the crossing
    if np.sign(g_of(hs)) == np.sign(g0) and hs < h:
        hs = min(h, np.nextafter(hs, math.inf))
    return hs


def _integrate(fun, y0, t0, t_end, opts, events, samplers=(), min_step=None):
    opts = opts or IntegratorOptions()
    if not t_end > t0:
        raise ValueError("t_end must exceed t0")
    events = _as_event_map(events)
    stepper = _Stepper(fun, opts)
    y = np.atleast_1d(np.asarray(y0, dtype=float)).copy()
    x = float(t0)
    span = float(t_end) - x
    if min_step is None:
        min_step = 1e-14 * span
    h = min(opts.initial_step, opts.max_step, span)

    for label, g in events.items():
        if g(x, y) == 0.0:
            raise ValueError(f"event {label!r} vanishes at the initial point")

    record_steps = not samplers
    times, states = [x], [y.copy()]
    sample_idx = 0
    k1 = stepper.f(x, y)
    err_old = 1e-4
    n_steps = n_rej = 0
    beta = 0.04
    expo1 = 0.2 - 0.75 * beta
    termination = None

    while termination is None:
        if n_steps + n_rej >= opts.max_steps:
            termination = Termination(TerminationKind.MAX_STEPS, x)
            break
        last = False
        if x + h >= t_end:
            h = t_end - x
            last = True
        if h < min_step:
            termination = Termination(TerminationKind.STEP_SIZE_UNDERFLOW, x)
            break
        out = stepper.step(x, y, h, k1)
        if out is None:
            n_rej += 1
            h *= 0.25
            continue
        y_new, err, k7 = out
        en = stepper.error_norm(y, y_new, err)
        if not math.isfinite(en):
            n_rej += 1
            h *= 0.25
            continue
        fac11 = en ** expo1 if en > 0 else 0.0
        if en > 1.0:
            n_rej += 1
            h /= min(5.0, fac11 / 0.9)
            continue

        x_new = t_end if last else x + h
        # terminal events: earliest crossing wins
        hit = None
        for label, g in events.items():
            hs = _locate(stepper, x, y, k1, h, g)
            if hs is not None and (hit is None or hs < hit[0]):
                hit = (hs, label)
        if hit is not None:
            hs, label = hit
            h_cut = hs
            x_cut = x + hs
        else:
            h_cut, x_cut = h, x_new

        while sample_idx < len(samplers):
            g = samplers[sample_idx]
            hs = _locate(stepper, x, y, k1, h_cut, g)
            if hs is None:
                break
            ys = y_new if hs == h else stepper.step(x, y, hs, k1)[0]
            times.append(x + hs)
            states.append(ys)
            sample_idx += 1

        n_steps += 1
        if hit is not None:
            y_hit = stepper.step(x, y, h_cut, k1)[0] if h_cut != h else y_new
            if record_steps or not times or times[-1] < x_cut:
                times.append(x_cut)
                states.append(y_hit)
            termination = Termination(TerminationKind.EVENT, x_cut, label)
            break

        x, y, k1 = x_new, y_new, k7
        if record_steps:
            times.append(x)
            states.append(y.copy())
        if last:
            termination = Termination(TerminationKind.REACHED_HORIZON, x)
            break

        fac = fac11 / err_old ** beta
        fac = max(0.1, min(5.0, fac / 0.9))
        h = min(h / fac, opts.max_step)
        err_old = max(en, 1e-4)

    if samplers and termination.kind is not TerminationKind.EVENT and (not times or times[-1] < x):
        times.append(x)
        states.append(y.copy())
    return Trajectory(
        times=np.asarray(times, dtype=float),
        states=np.asarray(states, dtype=float).reshape(len(times), -1),
        termination=termination,
        n_steps=n_steps,
        n_rejected=n_rej,
    )


def integrate_adaptive(field, y0, t0, t_end, opts=None):
    """Integrate ``y' = field(t, y)`` from ``t0`` to ``t_end``.

    Returns a :class:`Trajectory` sampled at every accepted step. The run
    stops early with ``STEP_SIZE_UNDERFLOW`` when the controller asks for a
    step below ``1e-14 * (t_end - t0)``.
    """
    return _integrate(field, y0, t0, t_end, opts, None)


def integrate_with_event(field, y0, t0, t_end, opts=None, event=None):
    """Like :func:`integrate_adaptive` but stop at the first zero of ``event``.

    ``event`` is a callable ``g(t, y)`` or a mapping ``{label: g}``; the
    termination label is ``"event"`` for a bare callable. The returned final
    state satisfies ``|g(t*, y*)| <= 1e-10`` in practice (Brent on the step
    length to machine precision).
    """
    return _integrate(field, y0, t0, t_end, opts, event)


def integrate_reparametrized(field, y0, t0, t_end, opts=None, speed=None, event=None,
                             t_eval=None, tau_max=None):
    """Integrate ``y' = field(t, y)`` in a rescaled clock ``tau``.

    The augmented system ``dy/dtau = s * field``, ``dt/dtau = s`` with
    ``s = speed(t, y, field(t, y)) > 0`` is advanced with the adaptive pair,
    which keeps the step control well conditioned when ``field`` blows up
    (choose ``speed`` to vanish there).
    Events are functions of the physical ``(t, y)``. The horizon ``t_end`` is
    located as an event. With ``t_eval`` the trajectory is sampled at those
    physical times instead of at accepted steps.
    """
    opts = opts or IntegratorOptions()
    y0 = np.atleast_1d(np.asarray(y0, dtype=float))
    n = y0.size
    speed = speed or (lambda t, y, f: 1.0)

    def aug(tau, z):
        t, y = z[n], z[:n]
        f = np.asarray(field(t, y), dtype=float)
        s = speed(t, y, f)
        out = np.empty(n + 1)
        out[:n] = s * f
        out[n] = s
        return out

    events = {label: (lambda tau, z, g=g: g(z[n], z[:n])) for label, g in _as_event_map(event).items()}
    events["__horizon__"] = lambda tau, z: z[n] - t_end
    samplers = ()
    if t_eval is not None:
        t_eval = np.asarray(t_eval, dtype=float)
        if np.any(np.diff(t_eval) <= 0) or t_eval[0] < t0 or t_eval[-1] > t_end:
            raise ValueError("t_eval must be increasing and inside [t0, t_end]")
        samplers = tuple(lambda tau, z, tk=tk: z[n] - tk for tk in t_eval if tk > t0)
    if tau_max is None:
        tau_max = 1e6 * (t_end - t0) + 1e6
    traj = _integrate(aug, np.append(y0, t0), 0.0, tau_max, opts, events, samplers,
                      min_step=1e-14 * max(1.0, t_end - t0))
    times = traj.states[:, n]
    states = traj.states[:, :n]
    term = traj.termination
    if term.is_event:
        if term.label == "__horizon__":
            term = Termination(TerminationKind.REACHED_HORIZON, float(times[-1]))
        else:
            term = Termination(TerminationKind.EVENT, float(times[-1]), term.label)
    else:
        term = Termination(term.kind, float(times[-1]))
    if samplers and term.kind is TerminationKind.REACHED_HORIZON:
        # a sample at t_end and the horizon event land on the same point up to rounding
        keep = np.concatenate([[True], np.diff(times) > 1e-12 * max(1.0, t_end - t0)])
        times, states = times[keep], states[keep]
    return Trajectory(times=times, states=states, termination=term, n_steps=traj.n_steps,
                      n_rejected=traj.n_rejected, extras={"tau": traj.times})


def _fd_jacobian(residual, x):
    x = np.asarray(x, dtype=float)
    f0 = np.atleast_1d(residual(x))
    jac = np.empty((f0.size, x.size))
    for j in range(x.size):
        h = 1e-6 * max(1.0, abs(x[j]))
        xp, xm = x.copy(), x.copy()
        xp[j] += h
        xm[j] -= h
        jac[:, j] = (np.atleast_1d(residual(xp)) - np.atleast_1d(residual(xm))) / (2 * h)
    return jac


def newton_multistart(residual, jacobian=None, seeds=(), tol=1e-10, max_iter=60):
    """Run damped Newton from every seed and return the distinct real roots.

    Parameters
    ----------
    residual : callable
        ``F(x) -> array`` for a square system.
    jacobian : callable or None
        ``J(x) -> matrix``; central differences when None.
    seeds : iterable of array_like
    tol : float
        Acceptance threshold on ``max |F(root)|``.

    Returns
    -------
    list of ndarray
        Converged roots, deduplicated by relative distance ``1e-6``, in
        lexicographic order (so the result is independent of seed order).
    """
    seeds = [np.atleast_1d(np.asarray(s, dtype=float)) for s in seeds]
    if not seeds:
        raise ValueError("need at least one seed")
    if not tol > 0:
        raise ValueError("tol must be positive")
    jac = jacobian or (lambda x: _fd_jacobian(residual, x))

    roots = []
    for x in seeds:
        x = x.copy()
        ok = False
        for _ in range(max_iter):
            f = np.atleast_1d(residual(x))
            if np.max(np.abs(f)) <= tol:
                ok = True
                break
            J = np.atleast_2d(jac(x))
            try:
                dx = np.linalg.solve(J, -f)
            except np.linalg.LinAlgError:
                dx = np.linalg.lstsq(J, -f, rcond=None)[0]
            if not np.all(np.isfinite(dx)):
                break
            # backtrack on the residual norm
            fn = np.linalg.norm(f)
            lam = 1.0
            while lam > 1e-4:
                xt = x + lam * dx
                if np.linalg.norm(np.atleast_1d(residual(xt))) < fn:
                    break
                lam *= 0.5
            x = x + lam * dx
        if not ok:
            ok = np.max(np.abs(np.atleast_1d(residual(x)))) <= tol
        if ok:
            roots.append(x)

    roots.sort(key=lambda r: tuple(np.round(r, 9)))
    unique = []
    for r in roots:
        if all(np.linalg.norm(r - u) / max(1.0, np.linalg.norm(r), np.linalg.norm(u)) > 1e-6
               for u in unique):
            unique.append(r)
    return unique
