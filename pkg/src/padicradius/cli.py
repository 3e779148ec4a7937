"""Command line: load a JSON job, run one command, emit exact rational output.

Exit codes: 0 success, 1 verification failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys as _sys
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from pathlib import Path

import jsonschema

from .diffsys import ANNULUS, DISK, UNCAPPED, DiffSystem, DomainSpec, pullback
from .expr import ExprError, parse_expr, render
from .explorer import ExploreOptions, explore, serialize
from .field import INF, PrimeConfig
from .laurent import Dilate, Invert, Kummer, PoleError, RatFunc, RecentreAnnulus, RecentreDisk
from .profile import FitError, decompose_side, fit_concave_pl, sample_profile
from .radius import Cap, GaussPoint, RadiusOptions, RationalPoint, radius_at
from .suites import (
    annulus_points, concavity_check, continuity_check, dilation_check, inversion_check,
    run_random_suite, segment_of, transfer_suite_check,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

_RAT = {"oneOf": [{"type": "integer"},
                  {"type": "string", "pattern": r"^\s*-?\d+(\s*/\s*\d+)?\s*$"}]}
_RAT_OR_INF = {"oneOf": [_RAT, {"type": "null"}, {"const": "inf"}]}

SCHEMA = {
    "type": "object",
    "required": ["field", "system"],
    "additionalProperties": False,
    "properties": {
        "field": {
            "type": "object",
            "required": ["p"],
            "additionalProperties": False,
            "properties": {
                "p": {"type": "integer", "minimum": 2},
                "e": {"type": "integer", "minimum": 1},
                "u": _RAT,
            },
        },
        "system": {
            "oneOf": [
                {
                    "type": "object",
                    "required": ["mu", "matrix", "domain"],
                    "additionalProperties": False,
                    "properties": {
                        "mu": {"type": "integer", "minimum": 1},
                        "matrix": {"type": "array", "minItems": 1,
                                   "items": {"type": "array", "minItems": 1,
                                             "items": {"type": "string"}}},
                        "domain": {
                            "type": "object",
                            "required": ["kind", "t_lo"],
                            "additionalProperties": False,
                            "properties": {
                                "kind": {"enum": [DISK, ANNULUS, UNCAPPED]},
                                "t_lo": _RAT,
                                "t_hi": _RAT_OR_INF,
                                "open_lo": {"type": "boolean"},
                            },
                        },
                    },
                },
                {
                    "type": "object",
                    "required": ["random"],
                    "additionalProperties": False,
                    "properties": {
                        "random": {
                            "type": "object",
                            "additionalProperties": False,
                            "properties": {
                                "seed": {"type": "integer"},
                                "mu": {"type": "integer", "minimum": 1, "maximum": 3},
                                "kind": {"enum": [DISK, ANNULUS]},
                            },
                        },
                    },
                },
            ],
        },
        "task": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "N": {"type": "integer", "minimum": 1},
                "window": {"type": "integer", "minimum": 1},
                "grid": {"type": "integer", "minimum": 2},
                "tol": _RAT,
                "cap": {"enum": [c.value for c in Cap]},
                "h_max": {"type": "integer", "minimum": 0},
                "centers": {"type": "array", "items": {"type": "string"}},
                "depth": {"type": "integer", "minimum": 0},
                "t": _RAT,
                "point": {"type": "string"},
                "interval": {"type": "array", "items": _RAT, "minItems": 2, "maxItems": 2},
                "normalized": {"type": "boolean"},
                "map": {"type": "string"},
                "suite": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "seed": {"type": "integer"},
                        "count": {"type": "integer", "minimum": 1},
                        "N": {"type": "integer", "minimum": 1},
                        "mu_max": {"type": "integer", "minimum": 1, "maximum": 3},
                    },
                },
            },
        },
    },
}


class ConfigError(ValueError):
    """All problems found in a job file, not just the first."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("\n".join(self.errors))


@dataclass
class JobConfig:
    config: PrimeConfig
    system: DiffSystem | None
    task: dict = field(default_factory=dict)
    random_spec: dict | None = None


def format_rational(x):
    if x == INF:
        return "inf"
    if x == -INF:
        return "-inf"
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_decimal(x):
    """10 decimal places, round half to even."""
    x = Fraction(x)
    with localcontext() as ctx:
        ctx.prec = 60
        d = Decimal(x.numerator) / Decimal(x.denominator)
        return str(d.quantize(Decimal("1e-10"), rounding=ROUND_HALF_EVEN))


def _rat(x):
    if x is None or x == "inf":
        return INF
    return Fraction(str(x).replace(" ", ""))


def _path(err):
    return "/".join(str(p) for p in err.absolute_path) or "<root>"


def validate(doc):
    """Exhaustive schema errors as 'path: message' strings."""
    v = jsonschema.Draft202012Validator(SCHEMA)
    out = []
    for err in sorted(v.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path))):
        if err.validator == "oneOf" and err.context:
            # report the branch that got furthest instead of the bare oneOf failure
            best = max(err.context, key=lambda e: len(e.absolute_path))
            out.append(f"{_path(best)}: {best.message}")
        else:
            out.append(f"{_path(err)}: {err.message}")
    return out


def parse_const(text, config):
    """A field constant written as an expression in pi."""
    f = parse_expr(text, config)
    if isinstance(f, RatFunc) or (f.terms and set(f.terms) != {0}):
        raise ExprError("expected a constant (no T)", 0, text)
    return f.coeff(0)


def _field(fd, errors):
    """PrimeConfig from the field section, or None after recording what is wrong."""
    try:
        return PrimeConfig(fd["p"], fd.get("e", 1), _rat(fd.get("u", 1)))
    except (ValueError, TypeError, KeyError) as exc:
        errors.append(f"field: {exc}")
        return None


def build(doc):
    """JobConfig from a decoded JSON document; raises ConfigError listing every problem."""
    errors = validate(doc)
    if not isinstance(doc, dict):
        raise ConfigError(errors)
    schema_ok = not errors
    fd = doc.get("field")
    cfg = _field(fd, errors) if isinstance(fd, dict) else None
    task = dict(doc.get("task", {})) if isinstance(doc.get("task"), dict) else {}
    sd = doc.get("system")
    if isinstance(sd, dict) and "random" in sd:
        if errors:
            raise ConfigError(errors)
        return JobConfig(cfg, None, task, dict(sd["random"]))
    G = []
    dom = None
    if isinstance(sd, dict):
        mu = sd.get("mu")
        rows = sd.get("matrix") if isinstance(sd.get("matrix"), list) else []
        if isinstance(mu, int) and rows:
            if len(rows) != mu:
                errors.append(f"system/matrix: expected {mu} rows, got {len(rows)}")
            for i, r in enumerate(rows):
                if isinstance(r, list) and len(r) != mu:
                    errors.append(f"system/matrix/{i}: expected {mu} entries, got {len(r)}")
        # syntax errors are reported even when the field itself is invalid
        pcfg = cfg or PrimeConfig(3)
        for i, r in enumerate(rows):
            row = []
            for j, text in enumerate(r if isinstance(r, list) else []):
                if not isinstance(text, str):
                    continue
                try:
                    row.append(parse_expr(text, pcfg))
                except ExprError as exc:
                    errors.append(f"system/matrix/{i}/{j}: {exc}")
            G.append(row)
        dd = sd.get("domain")
        if schema_ok and isinstance(dd, dict):
            try:
                t_hi = _rat(dd.get("t_hi")) if "t_hi" in dd else INF
                dom = DomainSpec(dd["kind"], _rat(dd["t_lo"]), t_hi, dd.get("open_lo", False))
            except ValueError as exc:
                errors.append(f"system/domain: {exc}")
    if schema_ok:
        for key in ("t", "tol"):
            if key in task:
                task[key] = _rat(task[key])
        if "interval" in task:
            task["interval"] = [_rat(x) for x in task["interval"]]
            if task["interval"][0] >= task["interval"][1]:
                errors.append("task/interval: tA must be smaller than tB")
    if errors:
        raise ConfigError(errors)
    try:
        system = DiffSystem(G, dom, cfg)
    except (PoleError, ValueError) as exc:
        raise ConfigError([f"system: {exc}"])
    return JobConfig(cfg, system, task)


def load_config(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError([f"{path}: {exc.strerror}"])
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})"])
    return build(doc)


# --- commands ----------------------------------------------------------------


def _opts(job, flags):
    t = job.task
    cap = flags.cap or t.get("cap")
    if cap is None:
        cap = Cap.UNCAPPED if job.system is not None and job.system.domain.kind == UNCAPPED else Cap.DOMAIN
    return RadiusOptions(
        N=flags.terms or t.get("N", 400),
        window=flags.window or t.get("window", 50),
        cap=cap,
        tol=Fraction(flags.tol) if flags.tol is not None else t.get("tol", Fraction(1, 100)),
    )


def _system(job, flags):
    if job.system is not None:
        return job.system
    from .oracle import random_system

    spec = job.random_spec
    seed = flags.seed if flags.seed is not None else spec.get("seed", 0)
    return random_system(seed, mu=spec.get("mu", 1), kind=spec.get("kind", DISK), config=job.config)


def _interval(job, sys, flags):
    if flags.interval:
        try:
            a, b = (Fraction(x) for x in flags.interval.split(","))
        except ValueError:
            raise ConfigError([f"--interval: expected 'tA,tB', got {flags.interval!r}"])
        if a >= b:
            raise ConfigError(["--interval: tA must be smaller than tB"])
        return a, b
    if "interval" in job.task:
        return tuple(job.task["interval"])
    return segment_of(sys)


def _dump(doc):
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _reported(enc):
    return enc.v_reported if enc.v_reported is not None else enc.v_est


def _enc_doc(enc, t, decimals):
    v = _reported(enc)
    doc = {
        "t": format_rational(t),
        "v_est": format_rational(v),
        "v_est_exact": format_rational(enc.v_est),
        "v_cert": format_rational(enc.v_cert),
        "width": format_rational(enc.width),
        "t_cap": None if enc.t_cap is None else format_rational(enc.t_cap),
        "stabilized": enc.stabilized,
        "N": enc.N_used,
        "window": enc.window_used,
    }
    if v not in (INF, -INF):
        doc["v_norm"] = format_rational(v - t)
        if decimals:
            doc["v_est_decimal"] = format_decimal(enc.v_est)
    return doc


def cmd_radius(job, flags):
    sys = _system(job, flags)
    opts = _opts(job, flags)
    point = flags.point or job.task.get("point")
    if point is not None:
        try:
            c = parse_const(point, job.config)
        except ExprError as exc:
            raise ConfigError([f"point: {exc}"])
        x, t = RationalPoint(c), c.val()
    else:
        t = Fraction(flags.t) if flags.t is not None else job.task.get("t", sys.domain.t_lo)
        x = GaussPoint(t)
    try:
        enc = radius_at(sys, x, opts)
    except (PoleError, ValueError) as exc:
        raise ConfigError([f"radius: {exc}"])
    doc = _enc_doc(enc, t, flags.decimals)
    if flags.format == "csv":
        return EXIT_OK, f"t,v_est,v_cert\n{doc['t']},{doc['v_est']},{doc['v_cert']}\n"
    return EXIT_OK, _dump(doc)


def _samples(job, sys, flags):
    opts = _opts(job, flags)
    tA, tB = _interval(job, sys, flags)
    count = flags.grid or job.task.get("grid", 9)
    normalized = flags.normalized or job.task.get("normalized", False)
    try:
        return sample_profile(sys, tA, tB, count, opts, normalized=normalized), opts
    except (PoleError, ValueError) as exc:
        raise ConfigError([f"profile: {exc}"])


def cmd_profile(job, flags):
    sys = _system(job, flags)
    samples, _ = _samples(job, sys, flags)
    if flags.format == "csv":
        if flags.decimals:
            lines = ["t,v_est,v_cert,v_est_decimal"]
            lines += [f"{format_rational(s.t)},{format_rational(s.value)},"
                      f"{format_rational(s.cert)},{format_decimal(s.value)}" for s in samples]
            return EXIT_OK, "\n".join(lines) + "\n"
        lines = ["t,v_est,v_cert"]
        lines += [f"{format_rational(s.t)},{format_rational(s.value)},{format_rational(s.cert)}"
                  for s in samples]
        return EXIT_OK, "\n".join(lines) + "\n"
    rows = [{"t": format_rational(s.t), "v_est": format_rational(s.value),
             "v_cert": format_rational(s.cert), "width": format_rational(s.width)} for s in samples]
    return EXIT_OK, _dump({"normalized": samples[0].normalized, "samples": rows})


def cmd_fit(job, flags):
    sys = _system(job, flags)
    samples, opts = _samples(job, sys, flags)
    tol = Fraction(flags.tol) if flags.tol is not None else job.task.get("tol", Fraction(1, 50))
    try:
        fit = fit_concave_pl(samples, sys.mu, tol=tol)
    except FitError as exc:
        print(f"fit failed: {exc}", file=_sys.stderr)
        return EXIT_FAIL, ""
    h_max = job.task.get("h_max", 6)
    shift = 0 if samples[0].normalized else 1
    sides = []
    for ln in fit.lines:
        decs = decompose_side(ln.slope - shift, ln.intercept, sys.config, sys.mu, h_max)
        sides.append((ln, decs))
    if flags.format == "csv":
        lines = ["t_start,t_end,slope,intercept"]
        for k, (ln, _) in enumerate(sides):
            lines.append(",".join(format_rational(x) for x in
                                  (fit.breakpoints[k], fit.breakpoints[k + 1], ln.slope, ln.intercept)))
        return EXIT_OK, "\n".join(lines) + "\n"
    doc = {
        "normalized": samples[0].normalized,
        "breakpoints": [format_rational(b) for b in fit.breakpoints],
        "values": [format_rational(v) for v in fit.values],
        "sides": [{
            "slope": format_rational(ln.slope),
            "intercept": format_rational(ln.intercept),
            "decompositions": [{"h": format_rational(d.h), "j": d.j, "s": d.s,
                                "v_b": format_rational(d.v_b)} for d in decs],
        } for ln, decs in sides],
    }
    return EXIT_OK, _dump(doc)


def cmd_explore(job, flags):
    sys = _system(job, flags)
    tA, tB = _interval(job, sys, flags)
    texts = flags.centers.split(",") if flags.centers else job.task.get("centers", [])
    centers = []
    errors = []
    for text in texts:
        try:
            centers.append(parse_const(text, job.config))
        except ExprError as exc:
            errors.append(f"centers: {exc}")
    if errors:
        raise ConfigError(errors)
    depth = flags.depth if flags.depth is not None else job.task.get("depth", 1)
    ropts = _opts(job, flags)
    opts = ExploreOptions(N=ropts.N, window=ropts.window, count=flags.grid or job.task.get("grid", 9),
                          cap=ropts.cap, h_max=job.task.get("h_max", 6))
    try:
        graph = explore(sys, tA, tB, centers, depth, opts)
    except FitError as exc:
        print(f"fit failed: {exc}", file=_sys.stderr)
        return EXIT_FAIL, ""
    except (PoleError, ValueError) as exc:
        raise ConfigError([f"explore: {exc}"])
    if flags.format == "csv":
        tables = serialize(graph, "plot-data")
        if flags.out:
            out = Path(flags.out)
            for k, text in tables.items():
                out.with_name(f"{out.stem}_{k}{out.suffix or '.csv'}").write_text(text)
            return EXIT_OK, None
        return EXIT_OK, "".join(f"# segment {k}\n{text}" for k, text in tables.items())
    return EXIT_OK, serialize(graph, "structured")


def cmd_verify(job, flags):
    suite = job.task.get("suite")
    opts = _opts(job, flags)
    if suite is not None or job.system is None:
        suite = suite or {}
        seed = flags.seed if flags.seed is not None else suite.get("seed", 0)
        results = run_random_suite(seed, suite.get("count", 10), suite.get("mu_max", 3),
                                   flags.terms or suite.get("N", 100))
    else:
        sys = job.system
        results = []
        conc = concavity_check(sys, count=flags.grid or job.task.get("grid", 9), opts=opts)
        results.append(conc)
        results.append(continuity_check(sys, conc.data["samples"], Fraction(1, 50), opts))
        if sys.domain.is_disk:
            lo, hi = segment_of(sys)
            results.append(transfer_suite_check(sys, sys.config.zero(), (lo + hi) / 2, 10, opts))
        else:
            pts = annulus_points(sys)
            results.append(dilation_check(sys, sys.config(sys.config.p), pts, opts))
            results.append(inversion_check(sys, sys.config(sys.config.p ** 2), pts, opts))
    ok = all(r.passed for r in results)
    if flags.format == "json":
        text = _dump({"passed": ok, "checks": [{"name": r.name, "passed": r.passed, "detail": r.detail}
                                               for r in results]})
    else:
        text = "".join(r.line() + "\n" for r in results)
    return (EXIT_OK if ok else EXIT_FAIL), text


def parse_map(text, config):
    kind, _, arg = text.partition(":")
    kind = kind.strip().lower()
    if kind == "kummer":
        try:
            return Kummer(int(arg))
        except ValueError:
            raise ConfigError([f"--map: Kummer degree must be an integer, got {arg!r}"])
    makers = {"dilate": Dilate, "invert": Invert, "recentre": RecentreDisk,
              "recentre-annulus": RecentreAnnulus}
    if kind not in makers:
        raise ConfigError([f"--map: unknown map {kind!r} (kummer, dilate, invert, recentre, "
                           "recentre-annulus)"])
    try:
        c = parse_const(arg, config)
    except ExprError as exc:
        raise ConfigError([f"--map: {exc}"])
    if c.is_zero():
        raise ConfigError(["--map: parameter must be nonzero"])
    return makers[kind](c)


def system_doc(sys):
    """A loadable config for ``sys``."""
    cfg = sys.config
    dom = sys.domain
    return {
        "field": {"p": cfg.p, "e": cfg.e, "u": format_rational(cfg.u)},
        "system": {
            "mu": sys.mu,
            "matrix": [[render(g) for g in row] for row in sys.G],
            "domain": {"kind": dom.kind, "t_lo": format_rational(dom.t_lo),
                       "t_hi": None if dom.t_hi == INF else format_rational(dom.t_hi),
                       "open_lo": dom.open_lo},
        },
    }


def cmd_transform(job, flags):
    sys = _system(job, flags)
    spec = flags.map or job.task.get("map")
    if not spec:
        raise ConfigError(["transform needs --map"])
    m = parse_map(spec, job.config)
    try:
        new = pullback(sys, m)
    except (PoleError, ValueError) as exc:
        raise ConfigError([f"transform: {exc}"])
    return EXIT_OK, _dump(system_doc(new))


COMMANDS = {
    "radius": cmd_radius,
    "profile": cmd_profile,
    "fit": cmd_fit,
    "explore": cmd_explore,
    "verify": cmd_verify,
    "transform": cmd_transform,
}


def run(job, command, flags):
    """Run one command; returns (exit code, output text or None)."""
    try:
        return COMMANDS[command](job, flags)
    except ConfigError as exc:
        for line in exc.errors:
            print(f"error: {line}", file=_sys.stderr)
        return EXIT_INPUT, None


def make_parser():
    ap = argparse.ArgumentParser(prog="padicradius",
                                 description="Radii of convergence of p-adic differential systems.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("config", help="JSON job file")
    ap.add_argument("--terms", type=int, help="iteration depth N")
    ap.add_argument("--window", type=int, help="tail window W")
    ap.add_argument("--grid", type=int, help="number of grid points")
    ap.add_argument("--tol", help="rational tolerance")
    ap.add_argument("--cap", choices=[c.value for c in Cap])
    ap.add_argument("--out", help="output path (default stdout)")
    ap.add_argument("--format", choices=["json", "csv"])
    ap.add_argument("--seed", type=int)
    ap.add_argument("--t", help="log-radius of a Gauss point (use --t=-1/4 for negatives)")
    ap.add_argument("--point", help="rational point as an expression in pi")
    ap.add_argument("--interval", help="segment 'tA,tB'")
    ap.add_argument("--centers", help="comma-separated centers for explore")
    ap.add_argument("--depth", type=int)
    ap.add_argument("--map", help="kummer:K, dilate:A, invert:G, recentre:C or recentre-annulus:C")
    ap.add_argument("--normalized", action="store_true", help="profile v - t instead of v")
    ap.add_argument("--decimals", action="store_true", help="add 10-digit decimal columns")
    return ap


def main(argv=None):
    flags = make_parser().parse_args(argv)
    if flags.format is None:
        flags.format = "csv" if flags.out and flags.out.endswith(".csv") else "json"
        if flags.command == "verify" and not flags.out:
            flags.format = "text"
    for name in ("tol", "t"):
        val = getattr(flags, name)
        if val is not None:
            try:
                Fraction(val)
            except ValueError:
                print(f"error: --{name}: not a rational: {val!r}", file=_sys.stderr)
                return EXIT_INPUT
    try:
        job = load_config(flags.config)
    except ConfigError as exc:
        for line in exc.errors:
            print(f"error: {line}", file=_sys.stderr)
        return EXIT_INPUT
    code, text = run(job, flags.command, flags)
    if text:
        if flags.out:
            Path(flags.out).write_text(text)
        else:
            _sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
