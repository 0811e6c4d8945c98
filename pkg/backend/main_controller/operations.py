# 子命令操作分派模块
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from ..classical.action import action, action_batch, harmonic_action_exact, straight_line_remainder
from ..classical.bvp import solve_bvp
from ..classical.flow import DEFAULT_DT, flow
from ..classical.focal import FOCAL_THRESHOLD, analytic_focal_bound, focal_time
from ..experiments.approximate_solution import HORIZON_FACTOR, approximate_solution_residual
from ..experiments.frames import FrameParams, canonical_frames
from ..experiments.scaling_limit import scaling_limit_experiment
from ..experiments.strong_convergence import strong_convergence_experiment
from ..linprop.dispersive import dispersive_ratio, free_gaussian_ratio, harmonic_ratio_bound
from ..linprop.field_factory import FieldFactory
from ..linprop.free import free_propagate
from ..linprop.fujiwara import fujiwara_propagate
from ..linprop.grid import BOUNDARY_TOL, Field, GridSpec
from ..linprop.mehler import mehler_apply
from ..linprop.spectral import spectral_propagate
from ..nls.ground_state import ENERGY_W_EXACT, ground_state_W
from ..nls.observables import OBSERVABLE_COLUMNS, ObservableSeries, strichartz_S
from ..nls.problem import NLSProblem
from ..nls.split_step import BLOWUP_FACTOR, GRAD_FACTOR, RECORD_EVERY, split_step_evolve, time_reversal_defect
from ..nls.threshold import threshold_sweep
from ..potential.hypothesis import Box, verify_hypotheses
from ..potential.potential import Potential
from ..potential.potential_factory import PotentialFactory
from ..utils.exceptions import ConfigException
from ..utils.output_writer import write_csv, write_json
from ..utils.worker_pool import worker_pool
from config.enums import (ClassicalOperation, EvaluationMethod, ExperimentOperation, FieldPreset,
                          NLSOperation, PotentialName, PropagateOperation, ResolutionPolicy, Subcommand)
from config.lab_config import LabConfig
from config.section_params import SectionParams

DEFAULT_SAMPLES = 4096
DEFAULT_HALF_WIDTH = 5.0


@dataclass
class RunContext:
    """一次操作所需的配置、参数读取器与输出位置

    操作先完成全部计算，再通过 write_* 写出文件；写出的路径依次记在 outputs 里。
    """
    config: LabConfig
    params: SectionParams
    out_dir: str
    prefix: str
    seed: int
    outputs: List[str] = field(default_factory=list)

    def potential(self) -> Potential:
        return PotentialFactory.create_potential(self.config.potential.name, self.config.potential.params)

    def is_potential(self, name: PotentialName) -> bool:
        return self.config.potential.name == name

    def grid(self) -> GridSpec:
        if self.config.grid is None:
            raise ConfigException(f"操作 {self.prefix} 需要配置 'grid'")
        return GridSpec(self.config.grid.d, self.config.grid.L, self.config.grid.n)

    def dimension(self) -> int:
        return self.config.grid.d if self.config.grid is not None else 1

    def field(self, grid: Optional[GridSpec] = None) -> Field:
        if self.config.initial_field is None:
            raise ConfigException(f"操作 {self.prefix} 需要配置 'field'")
        grid = self.grid() if grid is None else grid
        return FieldFactory.create_field(grid, self.config.initial_field.preset, self.config.initial_field.params)

    def physical_grid(self) -> Optional[GridSpec]:
        """可选的物理网格（physical_L、physical_n），维数与主网格相同"""
        L = self.params.float("physical_L", None, positive=True)
        n = self.params.int("physical_n", None, minimum=8)
        if L is None and n is None:
            return None
        if L is None or n is None:
            raise ConfigException("'physical_L' 与 'physical_n' 必须同时给出")
        return GridSpec(self.dimension(), L, n)

    def method(self) -> EvaluationMethod:
        name = self.params.str("method", EvaluationMethod.RESCALED.name,
                               choices=[m.name for m in EvaluationMethod])
        return EvaluationMethod[name]

    def path(self, suffix: str) -> str:
        return os.path.join(self.out_dir, f"{self.prefix}{suffix}")

    def write_json(self, obj: Any, suffix: str = ".json") -> None:
        self.outputs.append(write_json(self.path(suffix), obj))

    def write_csv(self, header: Sequence[str], rows, suffix: str = ".csv") -> None:
        self.outputs.append(write_csv(self.path(suffix), header, rows))

    def write_field(self, f: Field, suffix: str = "_field") -> None:
        """一维场写 CSV，高维写二进制"""
        if f.grid.d == 1:
            self.outputs.append(f.write_csv(self.path(suffix + ".csv")))
        else:
            os.makedirs(self.out_dir, exist_ok=True)
            self.outputs.append(f.save_binary(self.path(suffix + ".bin")))


# ---------------------------------------------------------------- verify-potential

def run_verify(ctx: RunContext, operation: Optional[Enum]) -> Dict[str, Any]:
    """在盒子中采样检验位势假设"""
    p = ctx.potential()
    box_rows = ctx.params.matrix("box", None)
    if box_rows is not None:
        box = Box.coerce(box_rows)
    else:
        d = ctx.params.int("d", ctx.dimension(), minimum=1)
        box = Box.symmetric(ctx.params.float("half_width", DEFAULT_HALF_WIDTH, positive=True), d)
    samples = ctx.params.int("samples", DEFAULT_SAMPLES, minimum=1)
    delta = ctx.params.float("delta", None)
    report = verify_hypotheses(p, box, samples, delta=delta, seed=ctx.seed)
    ctx.write_json(report)
    return {"passed": report.passed}


# ---------------------------------------------------------------- classical

def _classical_flow(ctx: RunContext) -> Dict[str, Any]:
    p = ctx.potential()
    y = ctx.params.vector("y")
    eta = ctx.params.vector("eta", length=len(y))
    T = ctx.params.float("T")
    dt = ctx.params.float("dt", DEFAULT_DT, positive=True)
    trajectory = flow(p, y, eta, T, dt=dt)
    summary = {
        "T": T,
        "dt": dt,
        "steps": len(trajectory.times) - 1,
        "x_final": trajectory.x[-1],
        "xi_final": trajectory.xi[-1],
        "energy_drift": trajectory.energy_drift(),
    }
    ctx.outputs.append(trajectory.write_csv(ctx.path("_trajectory.csv")))
    ctx.write_json(summary)
    return {"energy_drift": summary["energy_drift"]}


def _classical_bvp(ctx: RunContext) -> Dict[str, Any]:
    p = ctx.potential()
    y = ctx.params.vector("y")
    x = ctx.params.vector("x", length=len(y))
    t = ctx.params.float("t")
    dt = ctx.params.float("dt", DEFAULT_DT, positive=True)
    focal_bound = ctx.params.float("focal_bound", None, positive=True)
    solution = solve_bvp(p, y, x, t, dt=dt, focal_bound=focal_bound)
    ctx.write_json({"t": t, "x": x, "y": y, "eta": solution.eta, "iterations": solution.iterations,
                    "residual": solution.residual})
    return {"iterations": solution.iterations}


def _classical_action(ctx: RunContext) -> Dict[str, Any]:
    p = ctx.potential()
    dt = ctx.params.float("dt", DEFAULT_DT, positive=True)
    focal_bound = ctx.params.float("focal_bound", None, positive=True)
    harmonic = ctx.is_potential(PotentialName.HARMONIC)
    cases = ctx.params.int("cases", None, minimum=1)
    if cases is None:
        y = ctx.params.vector("y")
        x = ctx.params.vector("x", length=len(y))
        t = ctx.params.float("t")
        result = action(p, t, x, y, dt=dt, focal_bound=focal_bound)
        payload = dict(result.to_dict(), t=t, x=x, y=y)
        if harmonic:
            exact = float(harmonic_action_exact(t, x, y))
            payload["S_exact"] = exact
            payload["relative_error"] = abs(result.S - exact) / max(abs(exact), 1.0)
        ctx.write_json(payload)
        return {"S": result.S}

    # 随机样本：t ∈ (0, t_max]，|x_i|, |y_i| ≤ radius
    d = ctx.params.int("d", 1, minimum=1)
    t_max = ctx.params.float("t_max", 1.0, positive=True)
    radius = ctx.params.float("radius", DEFAULT_HALF_WIDTH, positive=True)
    rng = np.random.default_rng(ctx.seed)
    t = t_max * (1.0 - rng.random(cases))
    x = rng.uniform(-radius, radius, size=(cases, d))
    y = rng.uniform(-radius, radius, size=(cases, d))
    batch = action_batch(p, t, x, y, dt=dt, focal_bound=focal_bound)
    header = ["t"] + [f"x{i}" for i in range(d)] + [f"y{i}" for i in range(d)] + ["S", "omega"]
    columns = [t[:, None], x, y, batch.S[:, None], batch.omega[:, None]]
    summary: Dict[str, Any] = {"cases": cases, "d": d, "t_max": t_max, "radius": radius,
                               "iterations": batch.iterations, "residual": batch.residual}
    if harmonic:
        exact = harmonic_action_exact(t, x, y)
        rel = np.abs(batch.S - exact) / np.maximum(np.abs(exact), 1.0)
        header += ["S_exact", "relative_error"]
        columns += [exact[:, None], rel[:, None]]
        summary["max_relative_error"] = float(rel.max())
    ctx.write_csv(header, np.hstack(columns).tolist())
    ctx.write_json(summary)
    return {"cases": cases}


def _classical_focal(ctx: RunContext) -> Dict[str, Any]:
    p = ctx.potential()
    box_rows = ctx.params.matrix("region", None)
    d = ctx.params.int("d", ctx.dimension(), minimum=1)
    region = Box.coerce(box_rows) if box_rows is not None else Box.symmetric(
        ctx.params.float("half_width", DEFAULT_HALF_WIDTH, positive=True), d)
    t_max = ctx.params.float("t_max", positive=True)
    samples = ctx.params.int("samples", 256, minimum=1)
    dt = ctx.params.float("dt", DEFAULT_DT, positive=True)
    threshold = ctx.params.float("threshold", FOCAL_THRESHOLD, positive=True)
    estimate = focal_time(p, region, t_max, samples=samples, dt=dt, threshold=threshold, seed=ctx.seed)
    ctx.write_csv(["t", "min_det"], zip(estimate.times, estimate.min_det))
    ctx.write_json(dict(estimate.to_dict(), analytic_bound=analytic_focal_bound(p, region.dim, threshold)))
    return {"delta0": estimate.delta0}


def _classical_straight_line(ctx: RunContext) -> Dict[str, Any]:
    p = ctx.potential()
    x = ctx.params.vector("x")
    y = ctx.params.vector("y", length=len(x))
    times = ctx.params.float_list("times", [0.2, 0.1, 0.05, 0.025])
    dt = ctx.params.float("dt", DEFAULT_DT, positive=True)
    result = straight_line_remainder(p, times, x, y, dt=dt)
    ctx.write_csv(["t", "remainder", "normalized"],
                  zip(result["times"], result["remainder"], result["normalized"]))
    ctx.write_json(dict(result, x=x, y=y))
    return {"slope": result["slope"]}


CLASSICAL_HANDLERS: Dict[ClassicalOperation, Callable[[RunContext], Dict[str, Any]]] = {
    ClassicalOperation.FLOW: _classical_flow,
    ClassicalOperation.BVP: _classical_bvp,
    ClassicalOperation.ACTION: _classical_action,
    ClassicalOperation.FOCAL: _classical_focal,
    ClassicalOperation.STRAIGHT_LINE: _classical_straight_line,
}


def run_classical(ctx: RunContext, operation: ClassicalOperation) -> Dict[str, Any]:
    return CLASSICAL_HANDLERS[operation](ctx)


# ---------------------------------------------------------------- propagate

def _propagate_with(ctx: RunContext, method: PropagateOperation, p: Potential, f: Field,
                    t: float) -> Dict[str, Any]:
    """按方法传播，返回 {"field": Field, ...诊断}"""
    if method == PropagateOperation.FREE:
        return {"field": free_propagate(f, t)}
    if method == PropagateOperation.MEHLER:
        if not ctx.is_potential(PotentialName.HARMONIC):
            raise ConfigException("mehler 传播只适用于 HARMONIC 位势")
        return {"field": mehler_apply(f, t)}
    if method == PropagateOperation.SPECTRAL:
        order = ctx.params.int("order", 2)
        return {"field": spectral_propagate(p, f, t, order=order), "order": order}
    policy = ResolutionPolicy[ctx.params.str("policy", ResolutionPolicy.STRICT.name,
                                             choices=[r.name for r in ResolutionPolicy])]
    result = fujiwara_propagate(p, f, t, policy=policy, dt=ctx.params.float("kernel_dt", None, positive=True),
                                focal_bound=ctx.params.float("focal_bound", None, positive=True))
    return {"field": result.field, "policy": policy.name, "masked_fraction": result.masked_fraction,
            "bvp_iterations": result.iterations, "bvp_residual": result.residual}


def run_propagate(ctx: RunContext, operation: PropagateOperation) -> Dict[str, Any]:
    """线性传播；可选 compare 指定另一种方法作为参照，给出相对 L² 误差"""
    p = ctx.potential()
    f = ctx.field()
    t = ctx.params.float("t")
    compare = None
    if "compare" in ctx.params.params:
        compare = ctx.params.str("compare", choices=[op.value for op in PropagateOperation])
    outcome = _propagate_with(ctx, operation, p, f, t)
    u = outcome.pop("field")
    summary: Dict[str, Any] = dict(outcome, method=operation.value, t=t, mass_in=f.mass(),
                                   mass_out=u.mass(), sup_out=u.norm_sup())
    if compare is not None:
        reference = _propagate_with(ctx, PropagateOperation(compare), p, f, t)["field"]
        summary["compare"] = compare
        summary["relative_l2_error"] = u.relative_l2_error(reference)
    ctx.write_field(u)
    ctx.write_json(summary)
    return {"mass_out": summary["mass_out"]}


# ---------------------------------------------------------------- nls

def _nls_problem(ctx: RunContext, default_mu: int = 1) -> NLSProblem:
    mu = ctx.params.int("mu", default_mu)
    if mu not in (-1, 0, 1):
        raise ConfigException(f"'{ctx.params.section}.params.mu' 必须是 -1、0 或 1，实际: {mu}")
    return NLSProblem(ctx.potential(), mu, ctx.grid(), ctx.params.float("power", None, positive=True))


def _nls_evolve(ctx: RunContext) -> Dict[str, Any]:
    prob = _nls_problem(ctx)
    u0 = ctx.field(prob.grid)
    T = ctx.params.float("T")
    dt = ctx.params.float("dt", positive=True)
    interval = ctx.params.vector("strichartz_interval", None, length=2)
    check_reversal = ctx.params.bool("time_reversal", False)
    result = split_step_evolve(
        prob, u0, T, dt,
        record_every=ctx.params.int("record_every", RECORD_EVERY, minimum=1),
        blowup_factor=ctx.params.float("blowup_factor", BLOWUP_FACTOR, positive=True),
        grad_factor=ctx.params.float("grad_factor", GRAD_FACTOR, positive=True),
        boundary_tol=ctx.params.float("boundary_tol", BOUNDARY_TOL, positive=True),
    )
    summary = dict(result.to_dict(), problem=prob, observables=result.series.summary())
    if interval is not None:
        summary["strichartz_interval"] = interval
        summary["strichartz_S"] = strichartz_S(result.series, tuple(interval))
    if check_reversal:
        summary["time_reversal_defect"] = time_reversal_defect(prob, u0, T, dt)
    ctx.outputs.append(result.series.write_csv(ctx.path("_observables.csv")))
    ctx.write_field(result.field)
    ctx.write_json(summary)
    return {"blowup": result.blowup}


def _nls_observables(ctx: RunContext) -> Dict[str, Any]:
    prob = _nls_problem(ctx)
    u = ctx.field(prob.grid)
    series = ObservableSeries()
    series.record(prob, 0.0, u)
    values = dict(zip(OBSERVABLE_COLUMNS, next(iter(series.rows()))))
    payload: Dict[str, Any] = dict(values, problem=prob, boundary_fraction=u.boundary_fraction())
    if prob.energy_critical and prob.grid.d == 3:
        payload["energy_ratio_W"] = values["energy"] / ENERGY_W_EXACT
    ctx.write_json(payload)
    return {"energy": values["energy"]}


def _nls_ground_state(ctx: RunContext) -> Dict[str, Any]:
    state = ground_state_W(ctx.grid(), radius=ctx.params.float("radius", None, positive=True))
    if ctx.params.bool("save_field", False):
        ctx.write_field(state.field())
    ctx.write_json(state)
    return {"residual": state.residual}


NLS_HANDLERS: Dict[NLSOperation, Callable[[RunContext], Dict[str, Any]]] = {
    NLSOperation.EVOLVE: _nls_evolve,
    NLSOperation.OBSERVABLES: _nls_observables,
    NLSOperation.GROUND_STATE: _nls_ground_state,
}


def run_nls(ctx: RunContext, operation: NLSOperation) -> Dict[str, Any]:
    return NLS_HANDLERS[operation](ctx)


# ---------------------------------------------------------------- experiment

def _experiment_strong_convergence(ctx: RunContext) -> Dict[str, Any]:
    p = ctx.potential()
    phi = ctx.field()
    t_inf = ctx.params.float("t_inf")
    frames = canonical_frames(p, ctx.params.float_list("scales"), ctx.params.float("c", 1.0), t_inf,
                              d=phi.grid.d)
    report = strong_convergence_experiment(p, phi, frames, t_inf=t_inf, method=ctx.method(),
                                           physical_grid=ctx.physical_grid(),
                                           order=ctx.params.int("order", 4))
    ctx.write_csv(report.COLUMNS, report.rows())
    ctx.write_json(report)
    return {"final_error": report.errors[-1]}


def _experiment_scaling_limit(ctx: RunContext) -> Dict[str, Any]:
    p = ctx.potential()
    phi = ctx.field()
    report = scaling_limit_experiment(
        p, phi, ctx.params.float_list("lambdas"),
        mu=ctx.params.int("mu", 0),
        power=ctx.params.float("power", None, positive=True),
        x0=ctx.params.vector("x0", None, length=phi.grid.d),
        window=ctx.params.float("window", 1.0, positive=True),
        dt=ctx.params.float("dt", 1e-3, positive=True),
        order=ctx.params.int("order", 4),
        method=ctx.method(),
        physical_grid=ctx.physical_grid(),
        record_every=ctx.params.int("record_every", RECORD_EVERY, minimum=1),
    )
    ctx.write_csv(report.COLUMNS, report.rows())
    ctx.write_json(report)
    return {"decreasing": report.is_decreasing()}


APPROX_COLUMNS = ["N", "N_prime", "T", "residual", "window_residual", "tail_residual",
                  "initial_mismatch", "stitch_defect"]


def _experiment_approx_solution(ctx: RunContext) -> Dict[str, Any]:
    p = ctx.potential()
    phi = ctx.field()
    d = phi.grid.d
    scales = ctx.params.float_list("scales")
    windows = ctx.params.float_list("windows", [1.0])
    if len(windows) == 1:
        windows = windows * len(scales)
    if len(windows) != len(scales):
        raise ConfigException("'experiment.params.windows' 的长度必须为 1 或与 scales 相同")
    prime_exponent = ctx.params.float("n_prime_exponent", 0.5)
    x0 = ctx.params.vector("x0", [0.0] * d, length=d)
    mu = ctx.params.int("mu", 1)
    power = ctx.params.float("power", None, positive=True)
    dt = ctx.params.float("dt", 1e-3, positive=True)
    record_every = ctx.params.int("record_every", RECORD_EVERY, minimum=1)
    horizon_factor = ctx.params.float("horizon_factor", HORIZON_FACTOR, positive=True)
    cutoffs = ctx.params.bool("cutoffs", True)
    frames = [FrameParams(t_n=0.0, x_n=tuple(x0), N=N, N_prime=1.0 if N == 1 else N ** prime_exponent)
              for N in scales]

    def run_cell(item):
        frame, T = item
        return approximate_solution_residual(p, frame, phi, T, mu=mu, power=power, dt=dt,
                                             record_every=record_every,
                                             horizon_factor=horizon_factor, cutoffs=cutoffs)

    reports = worker_pool.map(run_cell, list(zip(frames, windows)))
    rows = [[r.frame.N, r.frame.N_prime, r.window, r.residual, r.window_residual, r.tail_residual,
             r.initial_mismatch, r.stitch_defect] for r in reports]
    residuals = [r.residual for r in reports]
    ctx.write_csv(APPROX_COLUMNS, rows)
    ctx.write_json({"experiment": "approx-solution", "cells": reports, "residuals": residuals,
                    "decreasing": all(b <= a for a, b in zip(residuals, residuals[1:]))})
    return {"final_residual": residuals[-1]}


def _experiment_dispersive(ctx: RunContext) -> Dict[str, Any]:
    p = ctx.potential()
    f = ctx.field()
    if "times" in ctx.params.params:
        times = ctx.params.float_list("times")
    else:
        t_min = ctx.params.float("t_min", 0.05, positive=True)
        t_max = ctx.params.float("t_max", 0.5, positive=True)
        count = ctx.params.int("count", 10, minimum=2)
        times = np.linspace(t_min, t_max, count).tolist()
    policy = ResolutionPolicy[ctx.params.str("policy", ResolutionPolicy.STRICT.name,
                                             choices=[r.name for r in ResolutionPolicy])]
    series = dispersive_ratio(p, f, times, focal_bound=ctx.params.float("focal_bound", None, positive=True),
                              order=ctx.params.int("order", 2), policy=policy)
    header = ["t", "sup_norm", "ratio"]
    rows = [list(row) for row in series.rows()]
    payload: Dict[str, Any] = series.to_dict()
    reference: Optional[List[float]] = None
    if ctx.is_potential(PotentialName.HARMONIC):
        reference = [harmonic_ratio_bound(t, f.grid.d) for t in series.times]
        header.append("harmonic_bound")
    elif ctx.is_potential(PotentialName.ZERO) and ctx.config.initial_field.preset == FieldPreset.GAUSSIAN \
            and f.grid.d == 1:
        reference = [free_gaussian_ratio(t) for t in series.times]
        header.append("free_gaussian_ratio")
    if reference is not None:
        rows = [row + [ref] for row, ref in zip(rows, reference)]
        payload["reference"] = reference
        payload["reference_kind"] = header[-1]
    ctx.write_csv(header, rows)
    ctx.write_json(payload)
    return {"max_ratio": series.max_ratio}


def _experiment_threshold_sweep(ctx: RunContext) -> Dict[str, Any]:
    prob = _nls_problem(ctx, default_mu=-1)
    sweep = threshold_sweep(
        prob, ctx.params.float_list("kinetic_ratios"), ctx.params.float("T", positive=True),
        ctx.params.float("dt", positive=True),
        cutoff=ctx.params.float("cutoff", None, positive=True),
        record_every=ctx.params.int("record_every", RECORD_EVERY, minimum=1),
        blowup_factor=ctx.params.float("blowup_factor", BLOWUP_FACTOR, positive=True),
        grad_factor=ctx.params.float("grad_factor", GRAD_FACTOR, positive=True),
        boundary_tol=ctx.params.float("boundary_tol", BOUNDARY_TOL, positive=True),
    )
    ctx.write_csv(sweep.COLUMNS, sweep.rows())
    ctx.write_json(sweep)
    return {"cells": len(sweep.cells)}


EXPERIMENT_HANDLERS: Dict[ExperimentOperation, Callable[[RunContext], Dict[str, Any]]] = {
    ExperimentOperation.STRONG_CONVERGENCE: _experiment_strong_convergence,
    ExperimentOperation.SCALING_LIMIT: _experiment_scaling_limit,
    ExperimentOperation.APPROX_SOLUTION: _experiment_approx_solution,
    ExperimentOperation.DISPERSIVE: _experiment_dispersive,
    ExperimentOperation.THRESHOLD_SWEEP: _experiment_threshold_sweep,
}


def run_experiment(ctx: RunContext, operation: ExperimentOperation) -> Dict[str, Any]:
    return EXPERIMENT_HANDLERS[operation](ctx)


SUBCOMMAND_HANDLERS: Dict[Subcommand, Callable[[RunContext, Optional[Enum]], Dict[str, Any]]] = {
    Subcommand.VERIFY_POTENTIAL: run_verify,
    Subcommand.CLASSICAL: run_classical,
    Subcommand.PROPAGATE: run_propagate,
    Subcommand.NLS: run_nls,
    Subcommand.EXPERIMENT: run_experiment,
}
