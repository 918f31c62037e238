"""Command-line front end.

Exit codes: 0 success / all checks passed, 1 a statistical check failed,
2 usage or parameter error, 3 a formula's domain constraint was violated.
"""
from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, fields, replace
from decimal import Decimal
from fractions import Fraction
from pathlib import Path

import click
import numpy as np

from .analytic.limits import CONSTANT_ONLY, LimitTheoremId, limit_constants, limit_law
from .analytic.moments import exact_moments
from .mc import Functional, McConfig, collect, default_tau_cap
from .model import (
    DomainError,
    InitialLaw,
    MemoryRegime,
    ModelParams,
    ParameterError,
    UnsupportedModelError,
    resolve_policy,
)
from .rng import RngStream
from .verify.catalog import ACCEPTANCE_TITLES, DEFAULT_SEED, THEOREMS, run_acceptance, run_theorem
from .verify.report import assemble_report
from .verify.stats import TestResult
from .walk import simulate as simulate_walk

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3
FORMATS = ("csv", "json-lines")


@dataclass(frozen=True)
class RunSpec:
    """Everything that determines a command's output (the output path does not)."""

    command: str
    p: float | None = None
    q: float | None = None
    r: float | None = None
    boundary_ok: bool = False
    regime: str = "full"
    policy: str = "default"
    init: str | None = None
    n: int | None = None
    m: int | None = None
    seed: int | None = None
    functional: str | None = None
    theorem: str | None = None
    suite: str | None = None
    y: str | None = None
    extras: bool = False
    format: str = "csv"

    @property
    def has_params(self) -> bool:
        return self.p is not None

    def params(self) -> ModelParams:
        return ModelParams(self.p, self.q, self.r, allow_boundary=self.boundary_ok)

    def with_defaults(self, **defaults) -> "RunSpec":
        """Fill unset fields; p, q, r fall back to (0.5, 0.3, 0.2)."""
        if not self.has_params:
            defaults.update(p=0.5, q=0.3, r=0.2)
        return replace(self, **{k: v for k, v in defaults.items() if getattr(self, k) is None})

    def echo(self) -> dict:
        return asdict(self)

    def to_config_text(self) -> str:
        lines = []
        for k, v in sorted(self.echo().items()):
            lines.append(f"{k} = {'' if v is None else _fmt_value(v)}")
        return "\n".join(lines) + "\n"


_FIELD_TYPES = {f.name: f.type for f in fields(RunSpec)}


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _coerce(key: str, raw: str):
    kind = _FIELD_TYPES[key]
    raw = raw.strip()
    if raw == "" or raw.lower() == "none":
        return None
    if "bool" in kind:
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ParameterError(f"config key {key!r} expects true/false, got {raw!r}")
    try:
        if kind.startswith("float"):
            return float(Fraction(raw))
        if kind.startswith("int"):
            return int(raw)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParameterError(f"config key {key!r}: cannot parse {raw!r}") from exc
    return raw


def read_config(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _FIELD_TYPES:
            raise ParameterError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _coerce(key, value)
    return out


def _fill_probabilities(p, q, r):
    given = [v is not None for v in (p, q, r)]
    if not any(given):
        return None, None, None
    if sum(given) == 2:
        # decimal arithmetic so 1 - 0.5 - 0.3 echoes as 0.2
        rest = float(Decimal(1) - sum(Decimal(repr(v)) for v in (p, q, r) if v is not None))
        return tuple(rest if v is None else v for v in (p, q, r))
    if all(given):
        return p, q, r
    raise ParameterError("give at least two of --p, --q, --r (the third is 1 minus the others)")


def parse_y(text: str | None):
    """``-2:1/3,0:1/3,1:1/3`` -> ((-2.0, 1/3), ...)."""
    if text is None:
        return None
    pairs = []
    for item in text.split(","):
        if ":" not in item:
            raise ParameterError(f"law of Y entries look like value:prob, got {item!r}")
        v, w = item.split(":", 1)
        try:
            pairs.append((float(Fraction(v.strip())), float(Fraction(w.strip()))))
        except (ValueError, ZeroDivisionError) as exc:
            raise ParameterError(f"cannot parse law of Y entry {item!r}") from exc
    return tuple(pairs)


def build_spec(command: str, config_path, flags: dict) -> RunSpec:
    values = read_config(config_path) if config_path else {}
    values.pop("command", None)
    for k, v in flags.items():
        if v is not None:
            values[k] = v
    p, q, r = _fill_probabilities(values.pop("p", None), values.pop("q", None), values.pop("r", None))
    spec = RunSpec(command=command, p=p, q=q, r=r, **values)
    if spec.format not in FORMATS:
        raise ParameterError(f"format must be one of {FORMATS}, got {spec.format!r}")
    # validate names early so typos exit with a usage error
    MemoryRegime.parse(spec.regime)
    resolve_policy(MemoryRegime.parse(spec.regime), spec.policy)
    if spec.init is not None:
        InitialLaw.parse(spec.init)
    if spec.functional is not None:
        Functional.parse(spec.functional)
    if spec.theorem is not None:
        LimitTheoremId.parse(spec.theorem)
    for name in ("n", "m"):
        v = getattr(spec, name)
        if v is not None and v < 1:
            raise ParameterError(f"--{name} must be >= 1")
    if spec.has_params:
        spec.params()
    return spec


# -- output ------------------------------------------------------------------

class Output:
    """Collects rows and writes them with the RunSpec header."""

    def __init__(self, spec: RunSpec, columns):
        self.spec, self.columns, self.rows = spec, list(columns), []

    def add(self, *row) -> None:
        self.rows.append(row)

    def render(self) -> str:
        if self.spec.format == "csv":
            buf = io.StringIO()
            for k, v in sorted(self.spec.echo().items()):
                buf.write(f"# {k}={'' if v is None else _fmt_value(v)}\n")
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(self.columns)
            for row in self.rows:
                w.writerow([_cell(c) for c in row])
            return buf.getvalue()
        lines = [json.dumps({"run_spec": self.spec.echo()}, sort_keys=True)]
        for row in self.rows:
            lines.append(json.dumps({k: _json_cell(v) for k, v in zip(self.columns, row)}, sort_keys=True))
        return "\n".join(lines) + "\n"


def _cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return "nan" if math.isnan(v) else repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return "" if v is None else str(v)


def _json_cell(v):
    if isinstance(v, (np.floating, float)):
        return None if math.isnan(v) else float(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


def _write(text: str, output) -> None:
    if output in (None, "-"):
        click.echo(text, nl=False)
    else:
        Path(output).write_text(text)


def _emit_config(spec: RunSpec, path) -> None:
    if path:
        Path(path).write_text(spec.to_config_text())


# -- error handling ------------------------------------------------------------

def _guard(fn):
    import functools

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (DomainError, UnsupportedModelError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_DOMAIN)
        except ParameterError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_USAGE)
    return wrapper


def common_options(fn):
    opts = [
        click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
                     help="key = value file; flags override it"),
        click.option("--p", type=float, help="probability of repeating the recalled step"),
        click.option("--q", type=float, help="probability of flipping the recalled step"),
        click.option("--r", type=float, help="probability of a delay (step 0)"),
        click.option("--boundary-ok", "boundary_ok", is_flag=True, default=None,
                     help="allow p, q or r equal to 0 or 1"),
        click.option("--regime", help="full | first-step | first-two | last-step | first-and-last"),
        click.option("--policy", help="propagate | symmetric-resample | default"),
        click.option("--init", help="plus-one | minus-one | zero | three-point"),
        click.option("--n", type=int, help="horizon"),
        click.option("--m", type=int, help="number of replicas"),
        click.option("--seed", type=int, help="master seed"),
        click.option("--format", "format", type=click.Choice(FORMATS), help="output format"),
        click.option("--output", "-o", default=None, help="output file (default: stdout)"),
        click.option("--emit-config", default=None, help="also write the resolved config here"),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Elephant random walks with delays: simulation, exact moments and checks."""


@main.command()
@common_options
@click.option("--functional", help="emit one functional value per replica instead of paths")
@click.option("--y", help="finite law of a random scale Y, e.g. '-2:1/3,0:1/3,1:1/3'")
@_guard
def simulate(config_path, output, emit_config, **flags):
    """Trajectories (replica, n, step, partial_sum) or per-replica functional values."""
    spec = build_spec("simulate", config_path, flags)
    spec = spec.with_defaults(n=100, m=1, seed=0, init="plus-one" if spec.y is not None else "three-point")
    params = spec.params()
    _emit_config(spec, emit_config)
    if spec.functional is None and spec.y is None:
        out = Output(spec, ["replica", "n", "step", "partial_sum"])
        for i in range(spec.m):
            traj = simulate_walk(params, spec.regime, spec.policy, spec.init, spec.n, RngStream(spec.seed, i))
            for k, (x, s) in enumerate(zip(traj.steps, traj.sums), 1):
                out.add(i, k, int(x), int(s))
        _write(out.render(), output)
        return
    functional = Functional.parse(spec.functional or "sn")
    if spec.y is not None and not functional.is_scale_free:
        raise ParameterError(f"{functional.value} is not defined for scaled walks")
    cfg = McConfig(params, spec.regime, spec.policy, spec.init, spec.n, spec.m, spec.seed, functional,
                   parse_y(spec.y))
    ens = collect(cfg)
    out = Output(spec, ["replica", "functional_value"])
    if functional.is_absorption:
        src = ens.tau if functional is Functional.TAU else ens.s_tau
        vals = np.where(ens.tau > 0, src.astype(np.float64), np.nan)
    else:
        vals = ens.functional()
    for i, v in enumerate(vals):
        out.add(i, float(v) + 0.0)  # no "-0.0" in the output
    _write(out.render(), output)


@main.command()
@common_options
@click.option("--extras", is_flag=True, default=None, help="add auxiliary series as extra columns")
@_guard
def moments(config_path, output, emit_config, **flags):
    """Exact (n, mean, second_moment, variance) for n = 1..N."""
    spec = build_spec("moments", config_path, flags)
    spec = spec.with_defaults(n=100, seed=0, init="three-point")
    _emit_config(spec, emit_config)
    series = exact_moments(spec.params(), spec.regime, spec.policy, spec.init, spec.n)
    extra = sorted(series.extras) if spec.extras else []
    out = Output(spec, ["n", "mean", "second_moment", "variance", *extra])
    for i in range(series.n_max):
        out.add(i + 1, float(series.mean[i]), float(series.second_moment[i]), float(series.variance[i]),
                *(float(series.extras[k][i]) for k in extra))
    _write(out.render(), output)


@main.command()
@common_options
@click.option("--theorem", required=False, help="theorem id, e.g. T52")
@click.option("--y", help="finite law of Y for T43 / T43critical")
@_guard
def limits(config_path, output, emit_config, **flags):
    """Limit law (mixture components and moments) and named constants."""
    spec = build_spec("limits", config_path, flags)
    if spec.theorem is None:
        raise ParameterError("--theorem is required")
    spec = spec.with_defaults(seed=0, init="three-point")
    _emit_config(spec, emit_config)
    tid = LimitTheoremId.parse(spec.theorem)
    params = spec.params()
    policy = None if spec.policy == "default" else spec.policy
    payload = {"theorem": tid.value, "constants": limit_constants(params, tid, policy=policy)}
    if tid in CONSTANT_ONLY:
        payload["law"] = None
    else:
        law = limit_law(params, tid, f_y=parse_y(spec.y), policy=policy, init=spec.init)
        payload["law"] = law.to_dict()
        payload["weight_sum"] = math.fsum(w for w, _ in law.components)
        payload["moments"] = {str(k): law.moment(k) for k in range(5)}
        payload["atoms"] = [[loc, w] for loc, w in law.atoms]
    if spec.format == "json-lines":
        text = json.dumps({"run_spec": spec.echo()}, sort_keys=True) + "\n" + json.dumps(payload, sort_keys=True) + "\n"
    else:
        out = Output(spec, ["weight", "kind", "mean", "variance", "location"])
        for comp in (payload["law"] or {"components": []})["components"]:
            out.add(comp["weight"], comp["kind"], comp.get("mean"), comp.get("variance"), comp.get("location"))
        text = out.render()
        for k, v in sorted(payload["constants"].items()):
            text += f"# constant {k}={_cell(v)}\n"
    _write(text, output)


def _result_line(r: TestResult) -> str:
    op = "<=" if r.passed else ">"
    return f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.statistic:.6g} {op} {r.threshold:.6g}"


@main.command()
@common_options
@click.option("--theorem", help="run the checks of one theorem id")
@click.option("--suite", type=click.Choice(["acceptance", "theorems"]), help="run a whole catalog")
@click.option("--y", help="finite law of Y for T43 / T43critical")
@_guard
def verify(config_path, output, emit_config, **flags):
    """Monte Carlo checks against exact targets; exit 1 if any fails."""
    spec = build_spec("verify", config_path, flags)
    if (spec.theorem is None) == (spec.suite is None):
        raise ParameterError("give exactly one of --theorem or --suite")
    if spec.seed is None:
        spec = replace(spec, seed=DEFAULT_SEED)
    results: list[TestResult] = []
    if spec.suite == "acceptance":
        _emit_config(spec, emit_config)
        for k, res in run_acceptance(seed=spec.seed).items():
            ok = all(r.passed for r in res)
            click.echo(f"criterion {k:2d} {'PASS' if ok else 'FAIL'}  {ACCEPTANCE_TITLES[k]}", err=True)
            results.extend(res)
    elif spec.suite == "theorems":
        _emit_config(spec, emit_config)
        params = spec.params() if spec.has_params else None
        for tid in THEOREMS:
            results.extend(run_theorem(tid, params=params, n=spec.n, m=spec.m, seed=spec.seed))
    else:
        tid = LimitTheoremId.parse(spec.theorem)
        ts = THEOREMS[tid]
        # echo the settings the check actually runs with
        if not spec.has_params:
            spec = replace(spec, p=ts.params.p, q=ts.params.q, r=ts.params.r)
        spec = replace(spec.with_defaults(n=ts.n, m=ts.m), theorem=tid.value, regime=tid.regime.value)
        _emit_config(spec, emit_config)
        results.extend(run_theorem(tid, params=spec.params(), n=spec.n, m=spec.m,
                                   seed=spec.seed, f_y=parse_y(spec.y)))
    for r in results:
        click.echo(_result_line(r), err=True)
    report = assemble_report(results, spec.echo(), seed=spec.seed)
    if spec.format == "json-lines":
        lines = [json.dumps({"run_spec": spec.echo()}, sort_keys=True)]
        lines += [json.dumps(r.to_dict(), sort_keys=True) for r in results]
        d = report.to_dict()
        lines.append(json.dumps({"summary": {"passed": d["passed"], "failures": d["failures"],
                                             "fingerprint": d["fingerprint"]}}, sort_keys=True))
        text = "\n".join(lines) + "\n"
    else:
        text = "".join(f"# {k}={'' if v is None else _fmt_value(v)}\n" for k, v in sorted(spec.echo().items()))
        text += report.to_csv()
    _write(text, output)
    sys.exit(EXIT_OK if report.passed else EXIT_FAIL)


@main.command()
@click.argument("source", type=click.Path(exists=True, dir_okay=False))
@click.option("--output", "-o", default=None)
@_guard
def report(source, output):
    """Turn a json-lines verify output into a full JSON report."""
    results, run_spec = [], {}
    for line in Path(source).read_text().splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        if "run_spec" in obj:
            run_spec = obj["run_spec"]
        elif "summary" not in obj:
            try:
                results.append(TestResult(obj["name"], obj["statistic"], obj["threshold"], obj["sample_size"],
                                          obj["provenance"], obj.get("theorem"), obj.get("details", {})))
            except KeyError as exc:
                raise ParameterError(f"{source}: result line lacks field {exc}") from exc
    if not run_spec:
        raise ParameterError(f"{source} has no run_spec line; expected a json-lines verify output")
    rep = assemble_report(results, run_spec, seed=run_spec.get("seed"))
    _write(rep.to_json(), output)
    sys.exit(EXIT_OK if rep.passed else EXIT_FAIL)


if __name__ == "__main__":  # pragma: no cover
    main()
