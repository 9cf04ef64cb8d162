"""Scenario files, seeded campaigns, and deterministic report records.

A scenario is a JSON document naming the measure space, the value space, the
target, the scheme, the experiment, and tolerances.  Records produced from
equal scenarios (including the seed) are byte-identical in both output
formats; computed numbers are rendered as decimal strings at the configured
significant-digit count, and wall time is kept out of the emitted bytes.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass

import numpy as np

from . import expressions as ex
from . import extension as ext
from . import integrability as ui
from . import measures as ms
from . import metrics as mt
from . import simple as sp
from . import theorems as th
from . import values as vs
from .errors import (BochnerError, DomainError, NotConvergingError,
                     NotElementaryError, ResolutionError, ScenarioError,
                     StructuralError)

EXPERIMENTS = ("integrate", "welldef", "vitali", "riesz_fischer",
               "inequalities", "ui_report", "density")

SCHEME_KINDS = (ext.DYADIC_LEFT, ext.DYADIC_MID, ext.EXPLICIT_LIST)

DEFAULT_TOLERANCES = {
    "cauchy_tol": 1e-6,
    "in_measure_tol": 1e-3,
    "horizon": 64,
    "delta_grid_k": 20,
    "epsilon_grid": [1e-1, 1e-2, 1e-3],
}

DEFAULT_PAIRS = 10_000
DEFAULT_PRECISION = 17
MAX_DEPTH = ext.MAX_DEPTH

STATUS_SUCCESS = "success"
STATUS_INAPPLICABLE = "inapplicable"
STATUS_VIOLATION = "violation"

CSV_HEADER = ("experiment", "value_re", "value_im", "bound", "n_used", "status")


@dataclass(frozen=True)
class Tolerances:
    cauchy_tol: float
    in_measure_tol: float
    horizon: int
    delta_grid_k: int
    epsilon_grid: tuple[float, ...]

    @property
    def delta_grid(self) -> tuple[float, ...]:
        return tuple(2.0 ** -k for k in range(self.delta_grid_k + 1))


@dataclass(frozen=True)
class ScenarioSpec:
    experiment: str
    space: ms.MeasureSpace
    value_space: vs.ValueSpace
    target: object  # str | list[str] | dict | None
    scheme: dict
    scheme_b: dict | None
    tolerances: Tolerances
    pairs: int
    direction: str
    seed: int
    out_format: str
    precision: int

    def to_document(self) -> dict:
        doc = {
            "experiment": self.experiment,
            "space": _space_doc(self.space),
            "value_space": _vspace_doc(self.value_space),
            "scheme": dict(self.scheme),
            "tolerances": {
                "cauchy_tol": self.tolerances.cauchy_tol,
                "in_measure_tol": self.tolerances.in_measure_tol,
                "horizon": self.tolerances.horizon,
                "delta_grid_k": self.tolerances.delta_grid_k,
                "epsilon_grid": list(self.tolerances.epsilon_grid),
            },
            "pairs": self.pairs,
            "direction": self.direction,
            "seed": self.seed,
            "output": {"format": self.out_format, "precision": self.precision},
        }
        if self.target is not None:
            doc["target"] = self.target
        if self.scheme_b is not None:
            doc["scheme_b"] = dict(self.scheme_b)
        return doc


@dataclass
class ReportRecord:
    experiment: str
    inputs: dict
    payload: dict
    status: str
    value_re: str = ""
    value_im: str = ""
    bound: str = ""
    n_used: str = ""
    wall_time_s: float = 0.0  # informational; never emitted


# ---------------------------------------------------------------------------
# parsing


def _expect_keys(doc: dict, allowed: set[str], path: str) -> None:
    if not isinstance(doc, dict):
        raise ScenarioError("expected an object", field=path)
    for key in doc:
        if key not in allowed:
            raise ScenarioError(f"unknown field {key!r}", field=path)


def _get(doc, key, kind, path, default=None, required=False):
    if key not in doc:
        if required:
            raise ScenarioError("missing required field", field=f"{path}{key}")
        return default
    val = doc[key]
    if kind is float and isinstance(val, int) and not isinstance(val, bool):
        val = float(val)
    if not isinstance(val, kind) or isinstance(val, bool) and kind is not bool:
        raise ScenarioError(f"expected {kind.__name__}, got {type(val).__name__}",
                            field=f"{path}{key}")
    return val


def _parse_space(doc, path="space.") -> ms.MeasureSpace:
    _expect_keys(doc, {"kind", "total_mass", "weights"}, path.rstrip("."))
    kind = _get(doc, "kind", str, path, required=True)
    if kind == ms.INTERVAL:
        return ms.interval_space(_get(doc, "total_mass", float, path, default=1.0))
    if kind == ms.DISCRETE:
        weights = _get(doc, "weights", list, path, required=True)
        try:
            return ms.discrete_space(weights)
        except DomainError as exc:
            raise ScenarioError(str(exc), field=path + "weights") from exc
    raise ScenarioError(f"unknown space kind {kind!r}", field=path + "kind")


def _parse_vspace(doc, path="value_space.") -> vs.ValueSpace:
    _expect_keys(doc, {"kind", "dim", "norm"}, path.rstrip("."))
    kind = _get(doc, "kind", str, path, required=True)
    if kind == vs.SCALAR:
        return vs.scalar_space()
    if kind == vs.VECTOR:
        dim = _get(doc, "dim", int, path, required=True)
        tag = _get(doc, "norm", str, path, default=vs.NORM_TWO)
        try:
            return vs.vector_space(dim, tag)
        except DomainError as exc:
            raise ScenarioError(str(exc), field=path.rstrip(".")) from exc
    raise ScenarioError(f"unknown value-space kind {kind!r}", field=path + "kind")


def _space_doc(space: ms.MeasureSpace) -> dict:
    if space.kind == ms.INTERVAL:
        return {"kind": ms.INTERVAL, "total_mass": space.total_mass}
    return {"kind": ms.DISCRETE, "weights": list(space.weights)}


def _vspace_doc(vspace: vs.ValueSpace) -> dict:
    if vspace.kind == vs.SCALAR:
        return {"kind": vs.SCALAR}
    return {"kind": vs.VECTOR, "dim": vspace.dim, "norm": vspace.norm_tag}


def _parse_tolerances(doc, path="tolerances.") -> Tolerances:
    merged = dict(DEFAULT_TOLERANCES)
    if doc is not None:
        _expect_keys(doc, set(DEFAULT_TOLERANCES), path.rstrip("."))
        merged.update(doc)
    ct = _get(merged, "cauchy_tol", float, path, required=True)
    imt = _get(merged, "in_measure_tol", float, path, required=True)
    horizon = _get(merged, "horizon", int, path, required=True)
    k = _get(merged, "delta_grid_k", int, path, required=True)
    grid = _get(merged, "epsilon_grid", list, path, required=True)
    if ct <= 0 or imt <= 0 or horizon <= 0 or k <= 0:
        raise ScenarioError("tolerance fields must be positive", field=path.rstrip("."))
    eps = []
    for e in grid:
        if not isinstance(e, (int, float)) or isinstance(e, bool) or e <= 0:
            raise ScenarioError("epsilon grid entries must be positive numbers",
                                field=path + "epsilon_grid")
        eps.append(float(e))
    return Tolerances(ct, imt, horizon, k, tuple(eps))


def _parse_scheme_doc(doc, path) -> dict:
    _expect_keys(doc, {"kind", "depth", "maps"}, path)
    kind = _get(doc, "kind", str, path + ".", required=True)
    if kind not in SCHEME_KINDS:
        raise ScenarioError(f"unknown scheme kind {kind!r}", field=path + ".kind")
    out = {"kind": kind}
    if kind == ext.EXPLICIT_LIST:
        maps = _get(doc, "maps", list, path + ".", required=True)
        if not maps:
            raise ScenarioError("explicit scheme needs at least one map",
                                field=path + ".maps")
        out["maps"] = maps
    else:
        depth = _get(doc, "depth", int, path + ".", default=20)
        if not 1 <= depth <= MAX_DEPTH:
            raise ScenarioError(f"depth must lie in [1, {MAX_DEPTH}]",
                                field=path + ".depth")
        out["depth"] = depth
    return out


TOP_LEVEL_KEYS = {"experiment", "space", "value_space", "target", "scheme",
                  "scheme_b", "tolerances", "pairs", "direction", "seed",
                  "output"}


def scenario_from_document(doc: dict, experiment: str | None = None) -> ScenarioSpec:
    _expect_keys(doc, TOP_LEVEL_KEYS, "scenario")
    exp = doc.get("experiment", experiment)
    if exp is None:
        raise ScenarioError("missing required field", field="experiment")
    if experiment is not None and exp != experiment:
        raise ScenarioError(
            f"scenario names experiment {exp!r} but {experiment!r} was requested",
            field="experiment")
    if exp not in EXPERIMENTS:
        raise ScenarioError(f"unknown experiment {exp!r}", field="experiment")

    space = _parse_space(_get(doc, "space", dict, "", default={"kind": ms.INTERVAL}))
    vspace = _parse_vspace(_get(doc, "value_space", dict, "",
                                default={"kind": vs.SCALAR}))
    target = doc.get("target")
    if target is not None and not isinstance(target, (str, list, dict)):
        raise ScenarioError("target must be an expression string, a list of "
                            "component expressions, or a simple-map literal",
                            field="target")
    scheme = _parse_scheme_doc(
        _get(doc, "scheme", dict, "", default={"kind": ext.DYADIC_LEFT}), "scheme")
    scheme_b_doc = doc.get("scheme_b")
    scheme_b = (_parse_scheme_doc(scheme_b_doc, "scheme_b")
                if scheme_b_doc is not None else None)
    tolerances = _parse_tolerances(doc.get("tolerances"))
    pairs = _get(doc, "pairs", int, "", default=DEFAULT_PAIRS)
    if pairs < 1:
        raise ScenarioError("pairs must be positive", field="pairs")
    direction = _get(doc, "direction", str, "", default=th.BACKWARD)
    if direction not in (th.FORWARD, th.BACKWARD):
        raise ScenarioError(f"unknown direction {direction!r}", field="direction")
    seed = _get(doc, "seed", int, "", default=0)
    if seed < 0:
        raise ScenarioError("seed must be a nonnegative integer", field="seed")
    output = _get(doc, "output", dict, "", default={})
    _expect_keys(output, {"format", "precision"}, "output")
    out_format = _get(output, "format", str, "output.", default="records")
    if out_format not in ("records", "csv"):
        raise ScenarioError(f"unknown format {out_format!r}", field="output.format")
    precision = _get(output, "precision", int, "output.", default=DEFAULT_PRECISION)
    if not 1 <= precision <= 17:
        raise ScenarioError("precision must lie in [1, 17]", field="output.precision")

    spec = ScenarioSpec(exp, space, vspace, target, scheme, scheme_b,
                        tolerances, pairs, direction, seed, out_format, precision)
    _validate_materials(spec)
    return spec


def parse_scenario(text: str, experiment: str | None = None) -> ScenarioSpec:
    """Parse and fully validate a scenario document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise ScenarioError("scenario must be a JSON object")
    return scenario_from_document(doc, experiment)


def _validate_materials(spec: ScenarioSpec) -> None:
    """Eagerly build targets and schemes so malformed inputs fail at parse."""
    if spec.experiment in ("integrate", "welldef", "density", "riesz_fischer",
                           "vitali"):
        build_target_evaluator(spec)
        build_scheme(spec, spec.scheme)
        if spec.scheme_b is not None:
            build_scheme(spec, spec.scheme_b)


# ---------------------------------------------------------------------------
# building targets and schemes


def _component(value, path: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if (isinstance(value, list) and len(value) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool)
                    for v in value)):
        return complex(value[0], value[1])
    raise ScenarioError("component must be a number or an [re, im] pair",
                        field=path)


def _value_row(value, dim: int, path: str) -> tuple[complex, ...]:
    if dim == 1:
        return (_component(value, path),)
    if not isinstance(value, list) or len(value) != dim:
        raise ScenarioError(f"expected {dim} components", field=path)
    return tuple(_component(v, f"{path}[{i}]") for i, v in enumerate(value))


def simple_map_from_literal(doc: dict, space: ms.MeasureSpace,
                            vspace: vs.ValueSpace, path: str) -> sp.SimpleMap:
    """Simple-map literal: breakpoints+values (interval) or atom_values."""
    _expect_keys(doc, {"breakpoints", "values", "atom_values"}, path)
    if space.kind == ms.INTERVAL:
        breaks = _get(doc, "breakpoints", list, path + ".", required=True)
        raw = _get(doc, "values", list, path + ".", required=True)
        if len(raw) != max(len(breaks) - 1, 0):
            raise ScenarioError("need one value per piece", field=path + ".values")
        rows = [_value_row(v, vspace.dim, f"{path}.values[{i}]")
                for i, v in enumerate(raw)]
        try:
            return sp.step_map(space, vspace, breaks, rows)
        except (StructuralError, DomainError) as exc:
            raise ScenarioError(str(exc), field=path) from exc
    raw = _get(doc, "atom_values", list, path + ".", required=True)
    rows = [_value_row(v, vspace.dim, f"{path}.atom_values[{i}]")
            for i, v in enumerate(raw)]
    try:
        return sp.atom_map(space, vspace, rows)
    except (StructuralError, DomainError) as exc:
        raise ScenarioError(str(exc), field=path) from exc


def build_target_evaluator(spec: ScenarioSpec):
    """Vectorized evaluator for the scenario target (plus its exact map when
    the target is a simple-map literal)."""
    target = spec.target
    if target is None:
        raise ScenarioError("this experiment needs a target", field="target")
    if isinstance(target, dict):
        m = simple_map_from_literal(target, spec.space, spec.value_space, "target")
        return ext.evaluator_of_simple(m), m
    if spec.space.kind != ms.INTERVAL:
        raise ScenarioError("expression targets need an interval space",
                            field="target")
    comps = [target] if isinstance(target, str) else list(target)
    if len(comps) != spec.value_space.dim:
        raise ScenarioError(
            f"target has {len(comps)} components, value space has dimension "
            f"{spec.value_space.dim}", field="target")
    nodes = []
    for i, c in enumerate(comps):
        if not isinstance(c, str):
            raise ScenarioError("components must be expression strings",
                                field=f"target[{i}]")
        nodes.append(ex.parse_expression(c))
    return ex.expression_evaluator(nodes), None


def build_scheme(spec: ScenarioSpec, scheme_doc: dict) -> ext.ApproximationScheme:
    kind = scheme_doc["kind"]
    if kind == ext.EXPLICIT_LIST:
        maps = [simple_map_from_literal(m, spec.space, spec.value_space,
                                        f"scheme.maps[{i}]")
                for i, m in enumerate(scheme_doc["maps"])]
        return ext.explicit_scheme(maps)
    evaluator, _ = build_target_evaluator(spec)
    return ext.dyadic_scheme(spec.space, spec.value_space, evaluator,
                             scheme_doc["depth"], kind)


def build_target(spec: ScenarioSpec, scheme_doc: dict | None = None) -> ext.ApproximableMap:
    evaluator, exact = build_target_evaluator(spec)
    scheme = build_scheme(spec, scheme_doc or spec.scheme)
    return ext.ApproximableMap(spec.space, spec.value_space, evaluator, scheme,
                               exact_map=exact)


# ---------------------------------------------------------------------------
# seeded generators


def random_simple_map(rng: np.random.Generator, space: ms.MeasureSpace,
                      vspace: vs.ValueSpace, max_depth: int = 8) -> sp.SimpleMap:
    """Campaign distribution: a random dyadic grid of depth <= ``max_depth``
    (each interior gridpoint kept with probability 1/2) with value components
    drawn uniformly from the complex unit square."""
    if space.kind == ms.INTERVAL:
        depth = int(rng.integers(0, max_depth + 1))
        interior = np.arange(1, 2 ** depth) * 2.0 ** -depth
        keep = rng.random(interior.size) < 0.5
        breaks = np.concatenate([[0.0], interior[keep], [1.0]])
        n = breaks.size - 1
        vals = rng.random((n, vspace.dim)) + 1j * rng.random((n, vspace.dim))
        return sp.step_map(space, vspace, breaks, vals)
    n = len(space.weights)
    vals = rng.random((n, vspace.dim)) + 1j * rng.random((n, vspace.dim))
    return sp.atom_map(space, vspace, vals)


# ---------------------------------------------------------------------------
# records


def _fmt(x: float, precision: int) -> str:
    return format(float(x), f".{precision}g")


def _fmt_seq(xs, precision: int) -> list[str]:
    return [_fmt(x, precision) for x in xs]


def _fmt_element(v: vs.BanachElement, precision: int) -> list[dict]:
    return [{"re": _fmt(c.real, precision), "im": _fmt(c.imag, precision)}
            for c in v.components]


def _ui_payload(report: ui.UIModulusReport, precision: int) -> dict:
    verdict = report.verdict
    out = {
        "delta_grid": _fmt_seq(report.delta_grid, precision),
        "modulus_values": _fmt_seq(report.modulus_values, precision),
        "exact_flags": list(report.exact_flags),
        "uniformly_integrable": verdict.uniformly_integrable,
        "epsilon_delta_table": [
            {"epsilon": _fmt(e, precision),
             "delta": None if d is None else _fmt(d, precision)}
            for e, d in verdict.table
        ],
    }
    if verdict.failing_epsilon is not None:
        out["failing_epsilon"] = _fmt(verdict.failing_epsilon, precision)
        out["floor"] = _fmt(verdict.floor, precision)
    if report.horizon is not None:
        out["horizon"] = report.horizon
        out["stabilized"] = report.stabilized
    return out


def _record(spec: ScenarioSpec, payload: dict, status: str,
            value: vs.BanachElement | None = None, bound: float | None = None,
            n_used: int | None = None, wall: float = 0.0) -> ReportRecord:
    p = spec.precision
    rec = ReportRecord(
        experiment=spec.experiment,
        inputs=spec.to_document(),
        payload=payload,
        status=status,
        wall_time_s=wall,
    )
    if value is not None:
        rec.value_re = _fmt(value.components[0].real, p)
        rec.value_im = _fmt(value.components[0].imag, p)
    if bound is not None:
        rec.bound = _fmt(bound, p)
    if n_used is not None:
        rec.n_used = str(n_used)
    return rec


def _error_payload(exc: BochnerError) -> dict:
    out = {"error": type(exc).__name__, "message": str(exc)}
    report = getattr(exc, "report", None)
    if report is not None:
        out["floor"] = format(report.verdict.floor, ".17g") if report.verdict.floor is not None else None
    return out


# ---------------------------------------------------------------------------
# experiments


def _run_integrate(spec: ScenarioSpec) -> list[ReportRecord]:
    t = spec.tolerances
    target = build_target(spec)
    start = time.perf_counter()
    try:
        res = ext.extend_integral(target, t.cauchy_tol, t.horizon,
                                  in_measure_tol=t.in_measure_tol,
                                  delta_grid=t.delta_grid,
                                  epsilon_grid=t.epsilon_grid)
    except (NotElementaryError, NotConvergingError, ResolutionError) as exc:
        return [_record(spec, _error_payload(exc), STATUS_INAPPLICABLE,
                        wall=time.perf_counter() - start)]
    p = spec.precision
    payload = {
        "value": _fmt_element(res.value, p),
        "cauchy_bound": _fmt(res.cauchy_bound, p),
        "n_used": res.n_used,
        "in_measure_trace": _fmt_seq(res.in_measure_trace, p),
        "reference_depths": list(res.reference_depths),
        "cauchy_trace": _fmt_seq(res.cauchy_trace, p),
        "ui": _ui_payload(res.ui_report, p),
    }
    return [_record(spec, payload, STATUS_SUCCESS, value=res.value,
                    bound=res.cauchy_bound, n_used=res.n_used,
                    wall=time.perf_counter() - start)]


def _run_welldef(spec: ScenarioSpec) -> list[ReportRecord]:
    t = spec.tolerances
    evaluator, _ = build_target_evaluator(spec)
    scheme_a = build_scheme(spec, spec.scheme)
    b_doc = spec.scheme_b
    if b_doc is None:
        other = (ext.DYADIC_MID if spec.scheme["kind"] == ext.DYADIC_LEFT
                 else ext.DYADIC_LEFT)
        b_doc = {"kind": other, "depth": spec.scheme.get("depth", 20)}
    scheme_b = build_scheme(spec, b_doc)
    start = time.perf_counter()
    res = ext.well_definedness_audit(evaluator, scheme_a, scheme_b,
                                     t.cauchy_tol, t.horizon)
    wall = time.perf_counter() - start
    p = spec.precision
    if res.status == "inapplicable":
        return [_record(spec, {"status": res.status, "reason": res.reason},
                        STATUS_INAPPLICABLE, wall=wall)]
    payload = {
        "status": res.status,
        "discrepancy": _fmt(res.discrepancy, p),
        "bound_sum": _fmt(res.bound_sum, p),
        "value_a": _fmt_element(res.result_a.value, p),
        "value_b": _fmt_element(res.result_b.value, p),
        "cross_l1_trace": _fmt_seq(res.cross_l1_trace, p),
        "cross_mismatch": res.cross_mismatch,
        "in_measure_converged_a": res.result_a.in_measure_converged,
        "in_measure_converged_b": res.result_b.in_measure_converged,
    }
    status = STATUS_SUCCESS if res.status == "agree" else STATUS_VIOLATION
    return [_record(spec, payload, status, value=res.result_a.value,
                    bound=res.bound_sum, n_used=res.result_a.n_used, wall=wall)]


def _run_vitali(spec: ScenarioSpec) -> list[ReportRecord]:
    t = spec.tolerances
    target = build_target(spec)
    sequence = build_scheme(spec, spec.scheme)
    start = time.perf_counter()
    verdict = th.vitali_audit(target, sequence, spec.direction,
                              tol=t.cauchy_tol, horizon=t.horizon,
                              in_measure_tol=t.in_measure_tol,
                              delta_grid=t.delta_grid,
                              epsilon_grid=t.epsilon_grid)
    wall = time.perf_counter() - start
    p = spec.precision
    payload = {
        "direction": verdict.direction,
        "conclusion": verdict.conclusion,
        "horizon": verdict.horizon,
        "l1_trace": _fmt_seq(verdict.l1_trace, p),
        "in_measure_trace": _fmt_seq(verdict.in_measure_trace, p),
        "norm_integral_trace": _fmt_seq(verdict.norm_integral_trace, p),
        "ui": _ui_payload(verdict.ui_report, p),
    }
    if verdict.reason:
        payload["reason"] = verdict.reason
    if verdict.witness:
        payload["witness"] = {
            "index": verdict.witness.index,
            "lhs": _fmt(verdict.witness.lhs, p),
            "rhs": _fmt(verdict.witness.rhs, p),
            "description": verdict.witness.description,
        }
    status = {th.CONSISTENT: STATUS_SUCCESS,
              th.VIOLATION: STATUS_VIOLATION}.get(verdict.conclusion,
                                                  STATUS_INAPPLICABLE)
    return [_record(spec, payload, status, n_used=verdict.horizon, wall=wall)]


def _run_riesz_fischer(spec: ScenarioSpec) -> list[ReportRecord]:
    t = spec.tolerances
    sequence = build_scheme(spec, spec.scheme)
    start = time.perf_counter()
    try:
        res = th.riesz_fischer_construct(sequence, t.cauchy_tol, t.horizon,
                                         in_measure_tol=t.in_measure_tol)
    except (NotElementaryError, NotConvergingError, ResolutionError) as exc:
        return [_record(spec, _error_payload(exc), STATUS_INAPPLICABLE,
                        wall=time.perf_counter() - start)]
    p = spec.precision
    payload = {
        "limit_integral": _fmt_element(res.extension.value, p),
        "cauchy_bound": _fmt(res.extension.cauchy_bound, p),
        "n_used": res.extension.n_used,
        "fast_indices": list(res.fast_indices),
        "audit_conclusion": res.audit.conclusion,
    }
    return [_record(spec, payload, STATUS_SUCCESS, value=res.extension.value,
                    bound=res.extension.cauchy_bound, n_used=res.extension.n_used,
                    wall=time.perf_counter() - start)]


def _run_inequalities(spec: ScenarioSpec) -> list[ReportRecord]:
    t = spec.tolerances
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    p = spec.precision
    records = []
    for i in range(spec.pairs):
        s = random_simple_map(rng, spec.space, spec.value_space)
        u = random_simple_map(rng, spec.space, spec.value_space)
        start = time.perf_counter()
        slacks = mt.slacks(s, u, t.epsilon_grid)
        wall = time.perf_counter() - start
        worst = min(min(x.markov_slack, x.truncation_slack, x.triangle_slack)
                    for x in slacks)
        payload = {
            "pair": i,
            "min_slack": _fmt(worst, p),
            "slacks": [
                {"epsilon": _fmt(x.epsilon, p),
                 "markov": _fmt(x.markov_slack, p),
                 "truncation": _fmt(x.truncation_slack, p),
                 "triangle": _fmt(x.triangle_slack, p)}
                for x in slacks
            ],
        }
        ok = all(x.valid for x in slacks)
        rec = _record(spec, payload,
                      STATUS_SUCCESS if ok else STATUS_VIOLATION, wall=wall)
        rec.value_re = _fmt(worst, p)
        rec.value_im = _fmt(0.0, p)
        records.append(rec)
    return records


def _run_ui_report(spec: ScenarioSpec) -> list[ReportRecord]:
    t = spec.tolerances
    sequence = build_scheme(spec, spec.scheme)
    start = time.perf_counter()
    report = ui.sequence_ui_probe(sequence, t.horizon,
                                  delta_grid=t.delta_grid,
                                  epsilon_grid=t.epsilon_grid)
    wall = time.perf_counter() - start
    payload = {"ui": _ui_payload(report, spec.precision)}
    status = (STATUS_SUCCESS if report.verdict.uniformly_integrable
              else STATUS_INAPPLICABLE)
    rec = _record(spec, payload, status, n_used=report.horizon, wall=wall)
    rec.value_re = _fmt(report.modulus_values[-1], spec.precision)
    rec.value_im = _fmt(0.0, spec.precision)
    return [rec]


def _run_density(spec: ScenarioSpec) -> list[ReportRecord]:
    t = spec.tolerances
    records = []
    p = spec.precision
    for eps in t.epsilon_grid:
        target = build_target(spec)
        start = time.perf_counter()
        try:
            res = th.density_approximation(target, eps)
        except ResolutionError as exc:
            rec = _record(spec, dict(_error_payload(exc), epsilon=_fmt(eps, p)),
                          STATUS_INAPPLICABLE, wall=time.perf_counter() - start)
            records.append(rec)
            continue
        payload = {
            "epsilon": _fmt(eps, p),
            "achieved_distance": _fmt(res.achieved_distance, p),
            "index": res.index,
            "reference_index": res.reference_index,
            "pieces": int(res.map.vals.shape[0]),
        }
        rec = _record(spec, payload, STATUS_SUCCESS, n_used=res.index,
                      bound=res.achieved_distance,
                      wall=time.perf_counter() - start)
        rec.value_re = _fmt(res.achieved_distance, p)
        rec.value_im = _fmt(0.0, p)
        records.append(rec)
    return records


_RUNNERS = {
    "integrate": _run_integrate,
    "welldef": _run_welldef,
    "vitali": _run_vitali,
    "riesz_fischer": _run_riesz_fischer,
    "inequalities": _run_inequalities,
    "ui_report": _run_ui_report,
    "density": _run_density,
}


def run_campaign(spec: ScenarioSpec) -> list[ReportRecord]:
    """Dispatch the experiment; module errors become failure records."""
    return _RUNNERS[spec.experiment](spec)


# ---------------------------------------------------------------------------
# emission


def emit_report(records: list[ReportRecord], out_format: str, stream) -> None:
    """Write records as JSON lines (sorted keys) or RFC-4180 CSV rows.

    Byte-identical for equal inputs; wall time is not emitted.
    """
    if not records:
        raise DomainError("no records to emit")
    if out_format == "records":
        for rec in records:
            doc = {
                "experiment": rec.experiment,
                "inputs": rec.inputs,
                "payload": rec.payload,
                "status": rec.status,
            }
            stream.write(json.dumps(doc, sort_keys=True, separators=(",", ":")))
            stream.write("\n")
        return
    if out_format == "csv":
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for rec in records:
            writer.writerow([rec.experiment, rec.value_re, rec.value_im,
                             rec.bound, rec.n_used, rec.status])
        return
    raise DomainError(f"unknown output format {out_format!r}")


def render_report(records: list[ReportRecord], out_format: str) -> str:
    buf = io.StringIO()
    emit_report(records, out_format, buf)
    return buf.getvalue()


def exit_code(records: list[ReportRecord]) -> int:
    """0 all success, 1 any inapplicable, 2 any violation."""
    statuses = {rec.status for rec in records}
    if STATUS_VIOLATION in statuses:
        return 2
    if STATUS_INAPPLICABLE in statuses:
        return 1
    return 0
