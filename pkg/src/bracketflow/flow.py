"""Integration of the bracket flow and singularity diagnostics.

The flow is d/dt mu = -pi(diag(0, Ric_mu)) mu.  Trajectories are advanced
with an embedded Dormand-Prince 4(5) pair (scipy's stepper) wrapped in a
monitoring loop that tracks the bracket norm, scalar curvature, tr Ric^2,
admissibility drift and the measured Lipschitz ratio |dmu/dt| / |mu|^3.

A finite-time singularity is declared only when two conditions hold at once:
the bracket norm exceeds a threshold, and the rigorous remaining-lifetime
bound (1/C)|mu|^-2 -- obtained by comparison from d/dt |mu|^2 <= C |mu|^4
with C measured along the trajectory -- drops below the reporting
resolution.  The singular time is then estimated by fitting a power law
|mu(t)| ~ K (omega - t)^e to the trajectory tail, and reported together with
the one-sided rigorous bound.  Backward-time behavior is obtained by
negating the right-hand side.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import RK45
from scipy.optimize import minimize_scalar

from .algebra import (
    DEFAULT_TOL,
    Dimensions,
    LieBracket,
    bracket_norm,
    check_conditions,
    pi_action,
)
from .curvature import NotInVarietyError, _ricci_from_tensor, koszul_ricci_oracle, ricci_operator

__all__ = [
    "IntegratorOptions",
    "FlowState",
    "Verdict",
    "Trajectory",
    "EstimateReport",
    "PowerLawFit",
    "FlowError",
    "StiffnessError",
    "DriftError",
    "bracket_flow_rhs",
    "integrate",
    "fit_power_blowup",
    "estimate_blowup_time",
    "estimate_report",
    "type_I_diagnostic",
    "DenseSolution",
]


class FlowError(RuntimeError):
    """Integration could not be completed."""


class StiffnessError(FlowError):
    """Step size underflowed without meeting the blowup criteria."""


class DriftError(FlowError):
    """Admissibility residuals drifted beyond tolerance along the flow."""


@dataclass(frozen=True)
class IntegratorOptions:
    """Knobs for `integrate` and the singularity verdict.

    step_cap bounds each step by step_cap * |mu| / |dmu/dt|, the measured
    relative-change timescale of the flow (at most step_cap / (C |mu|^2) by
    the cubic velocity bound), which keeps single steps from jumping across
    a singularity.  blowup_threshold and time_resolution together form the
    verdict: a threshold alone is not evidence of blowup, the remaining-time
    bound makes it quantitative.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    blowup_threshold: float = 1e6
    time_resolution: float = 1e-12
    step_cap: float = 0.5
    drift_tol: float = 1e-6
    membership_tol: float = DEFAULT_TOL
    max_steps: int = 200_000
    checkpoint_stride: int = 1
    collect_dense: bool = False


@dataclass(frozen=True)
class FlowState:
    """One checkpointed state of the flow."""

    t: float
    mu: LieBracket
    step: float
    err_est: float


@dataclass(frozen=True)
class Verdict:
    """Outcome of an integration.

    kind is 'immortal' (reached the horizon), 'blowup' (both singularity
    criteria met) or 'flat' (the zero bracket, an exact fixed point).  For a
    blowup, omega_est and its regression standard error come from the
    power-law fit (non-rigorous), while rigorous_bound is the one-sided
    comparison bound the singular time provably cannot precede (forward) or
    follow (backward).
    """

    kind: str
    omega_est: float | None = None
    omega_stderr: float | None = None
    exponent: float | None = None
    exponent_stderr: float | None = None
    rigorous_bound: float | None = None


@dataclass
class Trajectory:
    """Sampled bracket-flow solution.

    Scalar series are recorded at every accepted step; full states at every
    `checkpoint_stride`-th sample (plus the last).  Times are physical:
    decreasing for backward runs.
    """

    direction: str
    horizon: float
    initial: LieBracket
    t: np.ndarray
    mu_norm: np.ndarray
    scalar_R: np.ndarray
    tr_ric_sq: np.ndarray
    rhs_norm: np.ndarray
    jacobi_residual: np.ndarray
    h1_residual: np.ndarray
    h3_residual: np.ndarray
    checkpoints: list[FlowState]
    verdict: Verdict
    lipschitz_ratio: float
    dense: "DenseSolution | None" = None

    @property
    def dims(self) -> Dimensions:
        return self.initial.dims

    @property
    def n_samples(self) -> int:
        return len(self.t)


class DenseSolution:
    """Piecewise interpolant of an integrated flow, indexed by physical time.

    A stationary solution carries no segments and an explicit `span`.
    """

    def __init__(self, sign: float, y0: np.ndarray, segments: list, span: float | None = None):
        self._sign = sign
        self._y0 = np.array(y0)
        self._segments = segments
        self._ends = np.array([seg.t for seg in segments]) if segments else np.empty(0)
        self._span = span

    @property
    def t_max(self) -> float:
        """Largest elapsed time covered."""
        if self._span is not None:
            return self._span
        return float(self._ends[-1]) if len(self._ends) else 0.0

    def __call__(self, t_phys: float) -> np.ndarray:
        s = self._sign * float(t_phys)
        if s < 0 or s > self.t_max + 1e-15:
            raise ValueError(f"time {t_phys} outside the integrated range")
        if s == 0.0 or not self._segments:
            return self._y0.copy()
        idx = int(np.searchsorted(self._ends, s, side="left"))
        idx = min(idx, len(self._segments) - 1)
        return np.asarray(self._segments[idx](s), dtype=float)


def bracket_flow_rhs(mu: LieBracket) -> LieBracket:
    """Right-hand side -pi(diag(0, Ric_mu)) mu of the bracket flow."""
    rd = ricci_operator(mu, check=False)
    out = pi_action(rd.ric, mu)
    return LieBracket(mu.dims, -out.c)


def _default_rhs_tensor(c: np.ndarray, q: int) -> np.ndarray:
    d = c.shape[0]
    ric = _ricci_from_tensor(c, q)[0]
    abar = np.zeros((d, d))
    abar[q:, q:] = ric
    term1 = c @ abar.T
    term2 = (abar.T @ c.reshape(d, -1)).reshape(d, d, d)
    return -(term1 - term2 + np.transpose(term2, (1, 0, 2)))


def _flat_trajectory(initial: LieBracket, direction: str, horizon: float) -> Trajectory:
    # The zero bracket is an exact fixed point: synthesize a stationary
    # trajectory dense enough for the downstream estimators.
    sign = 1.0 if direction == "forward" else -1.0
    m = 33
    t = sign * np.linspace(0.0, horizon, m)
    zeros = np.zeros(m)
    cps = [FlowState(float(ti), initial, 0.0, 0.0) for ti in t]
    dense = DenseSolution(sign, initial.c.ravel(), [], span=horizon)
    return Trajectory(
        direction=direction,
        horizon=horizon,
        initial=initial,
        t=t,
        mu_norm=zeros.copy(),
        scalar_R=zeros.copy(),
        tr_ric_sq=zeros.copy(),
        rhs_norm=zeros.copy(),
        jacobi_residual=zeros.copy(),
        h1_residual=zeros.copy(),
        h3_residual=zeros.copy(),
        checkpoints=cps,
        verdict=Verdict(kind="flat"),
        lipschitz_ratio=0.0,
        dense=dense,
    )


def integrate(
    initial: LieBracket,
    direction: str = "forward",
    horizon: float = 10.0,
    opts: IntegratorOptions | None = None,
    rhs=None,
) -> Trajectory:
    """Integrate the bracket flow until the horizon or a singularity verdict.

    Args:
        initial: admissible starting bracket (membership is checked).
        direction: 'forward' or 'backward'; backward negates the right-hand
            side and reports physical (negative) times.
        horizon: positive amount of time to cover.
        opts: integrator options; defaults are suitable for the catalog.
        rhs: optional override mapping LieBracket -> LieBracket, used by
            mutation-sensitivity checks.  None means the bracket flow.

    Returns:
        A Trajectory whose verdict is 'immortal', 'blowup' or 'flat'.

    Raises:
        NotInVarietyError: the initial bracket fails admissibility.
        StiffnessError: step size underflowed without blowup evidence.
        DriftError: admissibility residuals exceeded `opts.drift_tol`.
        FlowError: the step budget was exhausted.
    """
    opts = opts or IntegratorOptions()
    if direction not in ("forward", "backward"):
        raise ValueError(f"direction must be 'forward' or 'backward', got {direction!r}")
    if horizon <= 0:
        raise ValueError("horizon must be positive")

    report = check_conditions(initial, tol=opts.membership_tol)
    if not report.passes(opts.membership_tol):
        name, value = report.worst()
        raise NotInVarietyError(f"initial bracket fails admissibility: {name} = {value:.3e}")

    if bracket_norm(initial) == 0.0:
        return _flat_trajectory(initial, direction, horizon)

    dims = initial.dims
    q, d = dims.q, dims.d
    sign = 1.0 if direction == "forward" else -1.0

    if rhs is None:
        def f_tensor(c):
            return _default_rhs_tensor(c, q)
    else:
        def f_tensor(c):
            return rhs(LieBracket(dims, c)).c

    def fun(_s, y):
        return sign * f_tensor(y.reshape(d, d, d)).ravel()

    y0 = initial.c.ravel().copy()
    nsq0 = float(np.dot(y0, y0))

    ts, norms, scalars, trsqs, rhsn = [], [], [], [], []
    jres, h1res, h3res = [], [], []
    checkpoints: list[FlowState] = []
    segments: list = []
    ratio_max = 0.0

    def record(s, y, step, err):
        nonlocal ratio_max
        c = y.reshape(d, d, d)
        nsq = float(np.dot(y, y))
        norm = np.sqrt(nsq)
        _, scalar, trsq = _ricci_from_tensor(c, q)
        fnorm = float(np.linalg.norm(f_tensor(c)))
        mu = LieBracket(dims, c)
        rep = check_conditions(mu, tol=opts.membership_tol)
        ts.append(s)
        norms.append(norm)
        scalars.append(scalar)
        trsqs.append(trsq)
        rhsn.append(fnorm)
        jres.append(rep.jacobi_residual)
        h1res.append(rep.h1_residual)
        h3res.append(rep.h3_residual)
        if norm > 0:
            ratio_max = max(ratio_max, fnorm / norm**3)
        idx = len(ts) - 1
        if idx % opts.checkpoint_stride == 0:
            checkpoints.append(FlowState(sign * s, mu, step, err))
        return nsq, norm, rep

    def remaining_bound(nsq):
        # d/dt |mu|^2 <= 2 ratio |mu|^4, so the norm cannot blow up within
        # (1 / (2 ratio)) |mu|^-2 of elapsed time.
        if ratio_max <= 0:
            return np.inf
        return 1.0 / (2.0 * ratio_max * nsq)

    def step_ceiling(norm, fnorm):
        return opts.step_cap * norm / fnorm if fnorm > 0 else np.inf

    record(0.0, y0, 0.0, 0.0)
    solver = RK45(
        fun,
        0.0,
        y0,
        t_bound=horizon,
        rtol=opts.rel_tol,
        atol=opts.abs_tol,
        max_step=step_ceiling(np.sqrt(nsq0), rhsn[0]),
    )

    blowup = False
    fail_msg = None
    n_steps = 0
    while solver.status == "running":
        if n_steps >= opts.max_steps:
            raise FlowError(f"step budget of {opts.max_steps} exhausted at t = {sign * solver.t}")
        msg = solver.step()
        n_steps += 1
        if solver.status == "failed":
            fail_msg = msg
            break
        step = solver.t - ts[-1]
        err = _error_estimate(solver, step)
        nsq, norm, rep = record(solver.t, solver.y, step, err)
        if opts.collect_dense:
            segments.append(solver.dense_output())
        solver.max_step = step_ceiling(norm, rhsn[-1])
        drift = max(rep.jacobi_residual, rep.h1_residual, rep.h3_residual) / (1.0 + nsq)
        if drift > opts.drift_tol:
            raise DriftError(
                f"admissibility drift {drift:.3e} exceeds {opts.drift_tol:.1e} at t = {sign * solver.t}"
            )
        if norm > opts.blowup_threshold and remaining_bound(nsq) < opts.time_resolution:
            blowup = True
            break

    if not blowup and solver.status == "failed":
        nsq_last = norms[-1] ** 2
        if norms[-1] > opts.blowup_threshold and remaining_bound(nsq_last) < opts.time_resolution:
            blowup = True  # the step floor was hit right at the singularity
        else:
            raise StiffnessError(f"integrator failed at t = {sign * ts[-1]}: {fail_msg}")

    t_arr = sign * np.array(ts)
    norm_arr = np.array(norms)
    if checkpoints[-1].t != t_arr[-1]:
        checkpoints.append(
            FlowState(float(t_arr[-1]), LieBracket(dims, solver.y.reshape(d, d, d)), 0.0, 0.0)
        )

    if blowup:
        fit = fit_power_blowup(np.array(ts), norm_arr)
        rem = remaining_bound(norm_arr[-1] ** 2)
        verdict = Verdict(
            kind="blowup",
            omega_est=sign * fit.omega,
            omega_stderr=fit.omega_stderr,
            exponent=fit.exponent,
            exponent_stderr=fit.exponent_stderr,
            rigorous_bound=sign * (ts[-1] + rem),
        )
    else:
        verdict = Verdict(kind="immortal")

    dense = DenseSolution(sign, y0, segments) if opts.collect_dense else None
    return Trajectory(
        direction=direction,
        horizon=horizon,
        initial=initial,
        t=t_arr,
        mu_norm=norm_arr,
        scalar_R=np.array(scalars),
        tr_ric_sq=np.array(trsqs),
        rhs_norm=np.array(rhsn),
        jacobi_residual=np.array(jres),
        h1_residual=np.array(h1res),
        h3_residual=np.array(h3res),
        checkpoints=checkpoints,
        verdict=verdict,
        lipschitz_ratio=ratio_max,
        dense=dense,
    )


def _error_estimate(solver, h: float) -> float:
    try:
        return float(np.linalg.norm(h * (solver.K.T @ solver.E)))
    except Exception:
        return float("nan")


@dataclass(frozen=True)
class PowerLawFit:
    """Result of fitting norm ~ K (omega - t)^exponent on a trajectory tail."""

    omega: float
    omega_stderr: float
    exponent: float
    exponent_stderr: float
    amplitude: float
    n_tail: int
    decades: float


def fit_power_blowup(times: np.ndarray, norms: np.ndarray, min_samples: int = 10) -> PowerLawFit:
    """Fit a diverging power law to the tail of a norm series.

    `times` must be increasing elapsed times approaching the singularity from
    below and `norms` the diverging quantity.  The tail is the final two
    decades of `norms` (clipped to what the series spans).  For each trial
    singular time the regression of log(norm) on log(omega - t) is linear
    least squares; the trial time is optimized on a log scale.

    Raises:
        ValueError: if the tail holds fewer than `min_samples` samples.
    """
    times = np.asarray(times, dtype=float)
    norms = np.asarray(norms, dtype=float)
    if times.ndim != 1 or times.shape != norms.shape:
        raise ValueError("times and norms must be 1-d arrays of equal length")
    mask = norms >= norms[-1] / 100.0
    tt = times[mask]
    yy = np.log(norms[mask])
    m = len(tt)
    if m < min_samples:
        raise ValueError(
            f"blowup fit needs at least {min_samples} samples in the final two decades, got {m}"
        )
    t_last = tt[-1]
    gaps = t_last - tt
    span = float(gaps[0]) if gaps[0] > 0 else 1.0
    last_gap = float(gaps[-2]) if m >= 2 and gaps[-2] > 0 else span * 1e-6

    def sse(u):
        x = np.log(np.exp(u) + gaps)
        a = np.vstack([np.ones_like(x), x]).T
        coef, *_ = np.linalg.lstsq(a, yy, rcond=None)
        r = yy - a @ coef
        return float(r @ r)

    res = minimize_scalar(
        sse,
        bounds=(np.log(last_gap * 1e-8), np.log(span * 1e3)),
        method="bounded",
        options={"xatol": 1e-12},
    )
    delta = float(np.exp(res.x))
    omega = t_last + delta

    x = np.log(delta + gaps)
    a = np.vstack([np.ones_like(x), x]).T
    coef, *_ = np.linalg.lstsq(a, yy, rcond=None)
    resid = yy - a @ coef
    ss = float(resid @ resid)
    dof = max(m - 3, 1)
    sigma2 = ss / dof
    xbar = x.mean()
    sxx = float(np.sum((x - xbar) ** 2))
    exp_stderr = np.sqrt(sigma2 / sxx) if sxx > 0 else np.inf

    # curvature of the objective in omega gives the (non-rigorous) standard error
    h = delta * 1e-3
    d2 = (sse(np.log(delta + h)) - 2.0 * ss + sse(np.log(max(delta - h, delta * 1e-6)))) / h**2
    omega_stderr = float(np.sqrt(2.0 * sigma2 / d2)) if d2 > 0 else np.inf

    decades = float(np.log10(norms[-1] / norms[mask][0])) if norms[mask][0] > 0 else np.inf
    return PowerLawFit(
        omega=omega,
        omega_stderr=omega_stderr,
        exponent=float(coef[1]),
        exponent_stderr=float(exp_stderr),
        amplitude=float(np.exp(coef[0])),
        n_tail=m,
        decades=decades,
    )


def estimate_blowup_time(traj: Trajectory) -> tuple[float, tuple[float, float]]:
    """Singular-time estimate and a +-1 standard error interval for a blowup.

    The interval is the regression standard error of the power-law fit and is
    not rigorous; the rigorous one-sided bound lives in the verdict.
    """
    if traj.verdict.kind != "blowup":
        raise ValueError("trajectory does not carry a blowup verdict")
    sign = 1.0 if traj.direction == "forward" else -1.0
    fit = fit_power_blowup(sign * traj.t, traj.mu_norm)
    est = sign * fit.omega
    return est, (est - fit.omega_stderr, est + fit.omega_stderr)


@dataclass(frozen=True)
class EstimateReport:
    """Measured quantities behind the flow estimates along one trajectory.

    velocity_ratio_max bounds |dmu/dt| / |mu|^3; tail_norm_floor is the observed
    minimum of |omega_est - t|^(1/2) |mu(t)| over the blowup tail (None when
    the run is not a blowup); scalar_evolution_max_relerr compares a finite-difference
    dR/dt against 2 tr Ric^2; monotone_R_violation measures any decrease of R
    in forward time relative to 1 + |R|; comparison_slack is the minimum of
    R(t) minus the scalar comparison solution, computed for forward runs with
    R(0) > 0 on the inner 99% of the comparison lifespan (None otherwise).
    """

    velocity_ratio_max: float
    tail_norm_floor: float | None
    scalar_evolution_max_relerr: float
    monotone_R_violation: float
    comparison_slack: float | None


def _local_derivative(t: np.ndarray, y: np.ndarray, k: int) -> float:
    # degree-4 polynomial through the 5 neighboring samples, differentiated
    # at the center; scaled coordinates keep the fit conditioned near a
    # singularity where spacings are ~1e-14 of t itself.
    tw = t[k - 2 : k + 3]
    yw = y[k - 2 : k + 3]
    tau = tw - t[k]
    s = np.max(np.abs(tau))
    if s == 0:
        return 0.0
    p = np.polyfit(tau / s, yw, 4)
    return float(p[3] / s)


def estimate_report(traj: Trajectory) -> EstimateReport:
    """Evaluate the flow estimates along a trajectory with >= 20 samples."""
    m = traj.n_samples
    if m < 20:
        raise ValueError(f"need at least 20 samples for the estimate report, got {m}")
    if np.all(traj.mu_norm == 0.0):
        return EstimateReport(0.0, None, 0.0, 0.0, None)

    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(traj.mu_norm > 0, traj.rhs_norm / traj.mu_norm**3, 0.0)
    velocity_ratio = float(np.max(ratios))

    evol_err = 0.0
    for k in range(2, m - 2):
        fd = _local_derivative(traj.t, traj.scalar_R, k)
        target = 2.0 * traj.tr_ric_sq[k]
        denom = max(abs(target), 1e-30)
        evol_err = max(evol_err, abs(fd - target) / denom)

    order = np.argsort(traj.t)
    r_asc = traj.scalar_R[order]
    drops = (r_asc[:-1] - r_asc[1:]) / (1.0 + np.abs(r_asc[:-1]))
    monotone = float(max(0.0, np.max(drops)))

    floor = None
    if traj.verdict.kind == "blowup":
        omega = traj.verdict.omega_est
        tail = traj.mu_norm >= traj.mu_norm[-1] / 100.0
        vals = np.sqrt(np.abs(omega - traj.t[tail])) * traj.mu_norm[tail]
        floor = float(np.min(vals))

    slack = None
    r0 = float(traj.scalar_R[0])
    n = traj.dims.n
    if traj.direction == "forward" and r0 > 0:
        t_pole = (n / 2.0) / r0
        mask = traj.t <= 0.99 * t_pole
        if np.any(mask):
            comp = 1.0 / (1.0 / r0 - (2.0 / n) * traj.t[mask])
            slack = float(np.min(traj.scalar_R[mask] - comp))

    return EstimateReport(
        velocity_ratio_max=velocity_ratio,
        tail_norm_floor=floor,
        scalar_evolution_max_relerr=evol_err,
        monotone_R_violation=monotone,
        comparison_slack=slack,
    )


def type_I_diagnostic(traj: Trajectory) -> float:
    """Sup of |omega_est - t| * |Riem(mu(t))| over the blowup tail (q = 0).

    A finite value is the signature of a type-I singularity.  |Riem| comes
    from the Koszul oracle, so isotropy is rejected.
    """
    if traj.dims.q != 0:
        raise ValueError("type-I diagnostic needs q = 0 (no |Riem| oracle with isotropy)")
    if traj.verdict.kind != "blowup":
        raise ValueError("type-I diagnostic applies to blowup trajectories")
    omega = traj.verdict.omega_est
    cutoff = traj.mu_norm[-1] / 100.0
    best = 0.0
    for cp in traj.checkpoints:
        if bracket_norm(cp.mu) < cutoff:
            continue
        riem = np.sqrt(koszul_ricci_oracle(cp.mu).riem_sq)
        best = max(best, abs(omega - cp.t) * riem)
    return float(best)
