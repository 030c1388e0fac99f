"""Scenario files, trajectory CSV output and machine-readable reports.

A scenario is a plain key = value text file ('#' starts a comment).  The
initial data is either a catalog reference or inline structure constants:

    name       = su2-demo
    catalog    = su2_round          # or inline: q, n and bracket
    direction  = forward            # forward | backward | both
    horizon    = 2.0

    q = 0
    n = 3
    bracket = (1,2,3, 1.0) (2,3,1, 1.0) (3,1,2, 1.0)   # 1-indexed (i,j,k,value)

    rel_tol = 1e-10                 # integrator overrides, all optional:
    abs_tol = 1e-12                 # blowup_threshold, time_resolution,
    sample_stride = 1               # step_cap, drift_tol, max_steps,
    checkpoint_stride = 1           # validation_tol
    expect_forward = blowup         # optional expectations: immortal |
    expect_omega = 1.0              # blowup | flat, and singular times
    expect_tol = 1e-3

Bracket indices in files are 1-based, as in hand calculations; they are
converted to 0-based internally.  Inline brackets are validated at load
time; a failing admissibility condition rejects the scenario naming the
offending residual.

Running a scenario writes, per direction, a CSV trajectory table with
header ``t,mu_norm,scalar_R,tr_ric_sq,jacobi_residual`` (>= 15 significant
digits per value) and a JSON report with the verdict, the regression and
rigorous singular-time values, and the full estimate report.

Exit codes: 0 success, 1 verdict contradicts declared expectations,
2 load/validation error, 3 integrator failure.
"""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .algebra import LieBracket, check_conditions
from .catalog import get_entry
from .flow import FlowError, IntegratorOptions, Trajectory, estimate_report, integrate

__all__ = ["Scenario", "ScenarioError", "load_scenario", "run_scenario", "write_trajectory_csv"]

CSV_HEADER = "t,mu_norm,scalar_R,tr_ric_sq,jacobi_residual"

_OPTS_KEYS = {
    "rel_tol": float,
    "abs_tol": float,
    "blowup_threshold": float,
    "time_resolution": float,
    "step_cap": float,
    "drift_tol": float,
    "max_steps": int,
    "checkpoint_stride": int,
}


class ScenarioError(ValueError):
    """Scenario file could not be parsed or validated."""


@dataclass
class Scenario:
    name: str
    catalog_name: str | None = None
    q: int | None = None
    n: int | None = None
    triples: list | None = None
    directions: tuple = ("forward",)
    horizon: float = 10.0
    overrides: dict = field(default_factory=dict)
    sample_stride: int = 1
    validation_tol: float = 1e-10
    h2_note: str = ""
    expect: dict = field(default_factory=dict)
    expect_omega: float | None = None
    expect_alpha: float | None = None
    expect_tol: float = 1e-3

    def options(self, base: IntegratorOptions | None = None) -> IntegratorOptions:
        base = base or IntegratorOptions()
        merged = {f.name: getattr(base, f.name) for f in fields(IntegratorOptions)}
        merged.update(self.overrides)
        return IntegratorOptions(**merged)

    def bracket(self) -> LieBracket:
        if self.catalog_name is not None:
            return get_entry(self.catalog_name).bracket
        return LieBracket.from_triples(self.q, self.n, self.triples, one_indexed=True)


def _parse_triples(text: str, path: str, lineno: int) -> list:
    groups = re.findall(r"\(([^()]*)\)", text)
    if not groups:
        raise ScenarioError(f"{path}:{lineno}: bracket must list (i,j,k,value) groups")
    triples = []
    for g in groups:
        parts = [p for p in re.split(r"[,\s]+", g.strip()) if p]
        if len(parts) != 4:
            raise ScenarioError(f"{path}:{lineno}: bracket entry ({g}) needs exactly i, j, k, value")
        try:
            triples.append((int(parts[0]), int(parts[1]), int(parts[2]), float(parts[3])))
        except ValueError as exc:
            raise ScenarioError(f"{path}:{lineno}: bad bracket entry ({g}): {exc}") from exc
    return triples


def load_scenario(path) -> Scenario:
    """Parse and validate a scenario file.

    Raises:
        ScenarioError: with the offending line number on parse errors, or
            naming the failed admissibility condition and its residual when
            an inline bracket is rejected.
    """
    path = Path(path)
    if not path.exists():
        raise ScenarioError(f"{path}: no such file")
    sc = Scenario(name=path.stem)
    raw: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ScenarioError(f"{path}:{lineno}: expected 'key = value', got {line.strip()!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if not key or not value:
            raise ScenarioError(f"{path}:{lineno}: empty key or value")
        raw[key] = (value, lineno)

    def take(key, conv, default=None):
        if key not in raw:
            return default
        value, lineno = raw.pop(key)
        try:
            return conv(value)
        except (TypeError, ValueError) as exc:
            raise ScenarioError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc

    sc.name = take("name", str, sc.name)
    sc.catalog_name = take("catalog", str)
    sc.q = take("q", int)
    sc.n = take("n", int)
    if "bracket" in raw:
        value, lineno = raw.pop("bracket")
        sc.triples = _parse_triples(value, str(path), lineno)
        sc._bracket_line = lineno
    direction = take("direction", str, "forward").lower()
    if direction == "both":
        sc.directions = ("forward", "backward")
    elif direction in ("forward", "backward"):
        sc.directions = (direction,)
    else:
        raise ScenarioError(f"{path}: direction must be forward, backward or both, got {direction!r}")
    sc.horizon = take("horizon", float, sc.horizon)
    if sc.horizon <= 0:
        raise ScenarioError(f"{path}: horizon must be positive")
    sc.sample_stride = take("sample_stride", int, 1)
    sc.validation_tol = take("validation_tol", float, 1e-10)
    sc.h2_note = take("h2_note", str, "")
    for key, conv in _OPTS_KEYS.items():
        val = take(key, conv)
        if val is not None:
            sc.overrides[key] = val
    for dir_key, store in (("expect_forward", "forward"), ("expect_backward", "backward")):
        val = take(dir_key, str)
        if val is not None:
            val = val.lower()
            if val not in ("immortal", "blowup", "flat"):
                raise ScenarioError(f"{path}: {dir_key} must be immortal, blowup or flat")
            sc.expect[store] = val
    sc.expect_omega = take("expect_omega", float)
    sc.expect_alpha = take("expect_alpha", float)
    sc.expect_tol = take("expect_tol", float, 1e-3)

    if raw:
        key, (_, lineno) = next(iter(raw.items()))
        raise ScenarioError(f"{path}:{lineno}: unknown key {key!r}")

    has_inline = sc.triples is not None or sc.q is not None or sc.n is not None
    if sc.catalog_name is not None and has_inline:
        raise ScenarioError(f"{path}: give either catalog = ... or inline q/n/bracket, not both")
    if sc.catalog_name is None:
        if sc.q is None or sc.n is None or sc.triples is None:
            raise ScenarioError(f"{path}: inline scenarios need q, n and bracket")
        lineno = getattr(sc, "_bracket_line", 0)
        try:
            mu = LieBracket.from_triples(sc.q, sc.n, sc.triples, one_indexed=True)
        except ValueError as exc:
            raise ScenarioError(f"{path}:{lineno}: {exc}") from exc
        rep = check_conditions(mu, tol=sc.validation_tol, h2_note=sc.h2_note)
        if not rep.passes(sc.validation_tol):
            name, value = rep.worst()
            raise ScenarioError(
                f"{path}:{lineno}: inline bracket rejected: {name} = {value:.6e} "
                f"exceeds tolerance {sc.validation_tol:.1e}"
            )
    else:
        try:
            get_entry(sc.catalog_name)
        except KeyError as exc:
            raise ScenarioError(f"{path}: {exc.args[0]}") from exc
    return sc


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_trajectory_csv(traj: Trajectory, path: Path, stride: int = 1) -> None:
    """Write the sampled scalar series; the printed precision round-trips doubles."""
    rows = list(range(0, traj.n_samples, max(1, stride)))
    if rows[-1] != traj.n_samples - 1:
        rows.append(traj.n_samples - 1)
    lines = [CSV_HEADER]
    for k in rows:
        lines.append(
            ",".join(
                _fmt(v)
                for v in (
                    traj.t[k],
                    traj.mu_norm[k],
                    traj.scalar_R[k],
                    traj.tr_ric_sq[k],
                    traj.jacobi_residual[k],
                )
            )
        )
    path.write_text("\n".join(lines) + "\n")


def _verdict_dict(traj: Trajectory) -> dict:
    v = traj.verdict
    return {
        "kind": v.kind,
        "omega_est": v.omega_est,
        "omega_stderr_nonrigorous": v.omega_stderr,
        "fit_exponent": v.exponent,
        "fit_exponent_stderr": v.exponent_stderr,
        "rigorous_one_sided_bound": v.rigorous_bound,
    }


def run_scenario(scenario: Scenario, out_dir=".", base_opts: IntegratorOptions | None = None):
    """Integrate a scenario and write its CSV and report files.

    Returns:
        (exit_code, written_paths): 0 on success, 1 when a declared
        expectation is contradicted, 3 when the integrator fails.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    opts = scenario.options(base_opts)
    mu = scenario.bracket()
    written = []
    failed = False
    contradicted = []

    for direction in scenario.directions:
        report: dict = {
            "name": scenario.name,
            "direction": direction,
            "horizon": scenario.horizon,
            "source": scenario.catalog_name or "inline",
            "h2_note": scenario.h2_note or None,
        }
        base = out_dir / f"{scenario.name}_{direction}"
        try:
            traj = integrate(mu, direction, scenario.horizon, opts)
        except FlowError as exc:
            failed = True
            report["error"] = f"{type(exc).__name__}: {exc}"
            (base.parent / (base.name + "_report.json")).write_text(json.dumps(report, indent=2) + "\n")
            written.append(base.parent / (base.name + "_report.json"))
            continue

        csv_path = base.parent / (base.name + ".csv")
        write_trajectory_csv(traj, csv_path, scenario.sample_stride)
        written.append(csv_path)

        report["verdict"] = _verdict_dict(traj)
        report["samples"] = traj.n_samples
        report["lipschitz_ratio_max"] = traj.lipschitz_ratio
        try:
            est = estimate_report(traj)
            report["estimates"] = asdict(est)
        except ValueError as exc:
            report["estimates"] = None
            report["estimates_absent"] = str(exc)

        problems = []
        want_kind = scenario.expect.get(direction)
        if want_kind is not None and traj.verdict.kind != want_kind:
            problems.append(f"expected {want_kind}, got {traj.verdict.kind}")
        want_time = scenario.expect_omega if direction == "forward" else scenario.expect_alpha
        if want_time is not None:
            got = traj.verdict.omega_est
            if got is None or abs(got - want_time) > scenario.expect_tol:
                problems.append(
                    f"expected singular time {want_time} +- {scenario.expect_tol}, got {got}"
                )
        report["expectation_failures"] = problems
        if problems:
            contradicted.extend(problems)

        report_path = base.parent / (base.name + "_report.json")
        report_path.write_text(json.dumps(report, indent=2) + "\n")
        written.append(report_path)

    code = 3 if failed else (1 if contradicted else 0)
    return code, written
