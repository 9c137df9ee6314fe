"""Batch front end: config files, single-operator runs, suite execution.

Exit codes: 0 clean, 1 when the suite records a VIOLATION, 2 on usage or
config errors.  Reports embed the full config echo and the convention
flags so every run is reproducible from its own output.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
import time
from dataclasses import asdict, dataclass, field, fields, replace

from . import verify
from .grid import FieldFormatError, read_field, write_field
from .maximal import RadiusLadder, maximal
from .morrey import morrey_constant
from .riesz import riesz
from .spectral import frac_laplacian


@dataclass
class RunConfig:
    """Flat mirror of the config file sections."""

    # [params]
    d: int = 1
    alpha: float = 0.5
    r: float = 2.0
    p: float = 4.0
    q: float | None = None
    # [grid]
    n: int = 256
    extent: float = 8.0
    refinements: int = 2
    # [families]
    weight_alpha_fractions: tuple = (0.3, 0.5, 0.7)
    n_random_weights: int = 20
    n_random_sources: int = 20
    weight_seed: int = 1000
    source_seed: int = 2000
    weight_scale: float = 1.0
    cutoff: float = 1.0
    indicator_radius: float = 1.0
    gaussian_widths: tuple = (0.25, 0.5, 1.0)
    spectral_gaussian_widths: tuple = (0.2, 0.28, 0.38)
    spectral_bump_radii: tuple = ()
    spectral_random_count: int = 5
    duality_sources: int = 3
    # [checks]
    checks: tuple = verify.CHECK_NAMES
    # [lemma5]
    lemma5_p: float = 2.0
    lemma5_alpha: float = 0.25
    rho_min: float = 0.125
    rho_max: float = 2.0
    n_rho: int = 9
    # [conventions]
    morrey_convention: str = "avg"
    # [gate]
    oracle_gate: bool = True
    gate_n: int = 48
    # [verdicts]
    drift_tol: float = 0.15
    flatness_tol: float = 3.0
    # [output]
    report_path: str = ""
    curves_path: str = ""


_SECTION_OF = {
    "d": "params", "alpha": "params", "r": "params", "p": "params",
    "q": "params",
    "n": "grid", "extent": "grid", "refinements": "grid",
    "weight_alpha_fractions": "families", "n_random_weights": "families",
    "n_random_sources": "families", "weight_seed": "families",
    "source_seed": "families", "weight_scale": "families",
    "cutoff": "families", "indicator_radius": "families",
    "gaussian_widths": "families", "spectral_gaussian_widths": "families",
    "spectral_bump_radii": "families", "spectral_random_count": "families",
    "duality_sources": "families",
    "checks": "checks",
    "lemma5_p": "lemma5", "lemma5_alpha": "lemma5", "rho_min": "lemma5",
    "rho_max": "lemma5", "n_rho": "lemma5",
    "morrey_convention": "conventions",
    "oracle_gate": "gate", "gate_n": "gate",
    "drift_tol": "verdicts", "flatness_tol": "verdicts",
    "report_path": "output", "curves_path": "output",
}


def default_config(d: int = 1) -> RunConfig:
    """Shipped defaults: the canonical d = 1 campaign, or the d = 2 twin
    (smaller box and grid, alpha = 1 so the gradient corollary runs)."""
    if d == 1:
        return RunConfig()
    if d == 2:
        return RunConfig(
            d=2, alpha=1.0, r=1.5, p=2.0, n=48, extent=4.0,
            cutoff=0.75, indicator_radius=0.75,
            gaussian_widths=(0.3, 0.5, 0.7),
            spectral_gaussian_widths=(), spectral_bump_radii=(0.9, 1.1, 1.3),
            lemma5_p=2.0, lemma5_alpha=0.5, n_rho=7,
            duality_sources=2, gate_n=24,
        )
    raise ValueError(f"no default config for d={d}")


def _parse_value(raw: str, template):
    if isinstance(template, bool):
        return raw.strip().lower() in ("1", "true", "yes", "on")
    if isinstance(template, int):
        return int(raw)
    if isinstance(template, float) or template is None:
        return float(raw)
    if isinstance(template, tuple):
        items = [t.strip() for t in raw.split(",") if t.strip()]
        if all(isinstance(x, str) for x in template) and template:
            return tuple(items)
        return tuple(float(t) for t in items)
    if isinstance(template, str):
        return raw.strip()
    raise ValueError(f"cannot parse config value {raw!r}")


def load_config(path) -> RunConfig:
    cp = configparser.ConfigParser()
    try:
        read = cp.read(path)
    except configparser.Error as exc:
        raise ValueError(f"malformed config file {path!r}: {exc}") from exc
    if not read:
        raise ValueError(f"cannot read config file {path!r}")
    cfg = RunConfig()
    updates = {}
    for f in fields(RunConfig):
        section = _SECTION_OF[f.name]
        if cp.has_option(section, f.name):
            template = getattr(cfg, f.name)
            if f.name == "checks":
                template = ("x",)
            raw = cp.get(section, f.name)
            try:
                updates[f.name] = _parse_value(raw, template)
            except ValueError as exc:
                raise ValueError(
                    f"config option [{section}] {f.name}: {exc}") from exc
    # flag unknown options so typos do not silently fall back to defaults
    known = {(_SECTION_OF[f.name], f.name) for f in fields(RunConfig)}
    for section in cp.sections():
        for opt in cp.options(section):
            if (section, opt) not in known:
                raise ValueError(f"unknown config option [{section}] {opt}")
    return replace(cfg, **updates)


def write_config(cfg: RunConfig, path) -> None:
    cp = configparser.ConfigParser()
    for f in fields(RunConfig):
        section = _SECTION_OF[f.name]
        if not cp.has_section(section):
            cp.add_section(section)
        val = getattr(cfg, f.name)
        if val is None:
            continue
        if isinstance(val, tuple):
            val = ",".join(str(v) for v in val)
        cp.set(section, f.name, str(val))
    with open(path, "w") as fh:
        cp.write(fh)


def config_echo(cfg: RunConfig) -> dict:
    out = asdict(cfg)
    out["checks"] = list(out["checks"])
    for key in ("weight_alpha_fractions", "gaussian_widths",
                "spectral_gaussian_widths", "spectral_bump_radii"):
        out[key] = list(out[key])
    return out


def suite_to_json(suite: verify.SuiteReport, cfg: RunConfig,
                  timestamp: str | None = None) -> dict:
    reports = []
    for rep in suite.reports:
        commentary = rep.commentary
        diags = {k: v for k, v in rep.diagnostics.items() if k != "rho_curve"}
        if diags:
            extras = "; ".join(f"{k}={float(v):.6g}"
                               if isinstance(v, (int, float)) else f"{k}={v}"
                               for k, v in sorted(diags.items()))
            commentary = f"{commentary}; {extras}" if commentary else extras
        reports.append({
            "name": rep.name,
            "params": rep.params,
            "cases": [{"descriptor": c.descriptor, "lhs": c.lhs,
                       "rhs": c.rhs, "ratio": c.ratio} for c in rep.cases],
            "sup_ratio": rep.sup_ratio,
            "refinement": [{"h": h, "sup_ratio": s}
                           for h, s in rep.refinement],
            "verdict": rep.verdict,
            "commentary": commentary,
        })
    return {
        "config": config_echo(cfg),
        "conventions": dict(verify.CONVENTIONS),
        "timestamp": timestamp if timestamp is not None
        else time.strftime("%Y-%m-%dT%H:%M:%S"),
        "gate": suite.gate,
        "reports": reports,
        "verdicts": dict(suite.verdicts),
    }


def curves_csv(suite: verify.SuiteReport) -> str:
    """Plot data: ratio-vs-rho rows for the ball sweep, ratio-vs-h rows for
    every check's refinement trend."""
    lines = ["check,case,x_name,x,ratio"]
    for rep in suite.reports:
        for h, s in rep.refinement:
            lines.append(f"{rep.name},sup,h,{h!r},{s!r}")
        if rep.name == "lemma5":
            for c in rep.cases:
                if " rho=" in c.descriptor:
                    case, rho = c.descriptor.rsplit(" rho=", 1)
                    lines.append(
                        f"{rep.name},{case},rho,{float(rho)!r},{c.ratio!r}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_riesz(args) -> int:
    f = read_field(args.infile)
    out = riesz(f, args.alpha, method=args.method)
    write_field(out, args.outfile)
    return 0


def _cmd_maximal(args) -> int:
    f = read_field(args.infile)
    ladder = RadiusLadder.full(f.spec) if args.full_ladder else None
    write_field(maximal(f, ladder), args.outfile)
    return 0


def _cmd_morrey(args) -> int:
    b = read_field(args.infile)
    rep = morrey_constant(b, args.p, args.alpha, convention=args.convention)
    text = json.dumps(rep.as_dict(), indent=2)
    if args.outfile:
        with open(args.outfile, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _cmd_fraclap(args) -> int:
    u = read_field(args.infile)
    out = frac_laplacian(u, args.alpha, pad_factor=args.pad_factor)
    write_field(out, args.outfile)
    return 0


def _cmd_oracle_gate(args) -> int:
    ok = True
    for d, n in ((1, args.n), (2, args.n2)):
        gate = verify.oracle_gate(d=d, n=n, n_seeds=args.seeds)
        print(json.dumps(gate))
        ok = ok and gate["pass"]
    return 0 if ok else 1


def _cmd_verify(args) -> int:
    if args.config:
        cfg = load_config(args.config)
    else:
        cfg = default_config(args.d)
    if args.check != "all":
        if args.check not in verify.CHECK_NAMES:
            raise ValueError(f"unknown check {args.check!r}")
        cfg = replace(cfg, checks=(args.check,))
    if args.morrey_convention:
        cfg = replace(cfg, morrey_convention=args.morrey_convention)
    suite = verify.run_suite(cfg)
    doc = suite_to_json(suite, cfg)
    text = json.dumps(doc, indent=2)
    out_path = args.out or cfg.report_path
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    csv_path = args.csv or cfg.curves_path
    if csv_path:
        with open(csv_path, "w") as fh:
            fh.write(curves_csv(suite))
    for name, verdict in suite.verdicts.items():
        print(f"{name}: {verdict}", file=sys.stderr)
    return 1 if suite.has_violation else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="rieszkit",
        description="Riesz potential / maximal operator / Morrey condition "
                    "toolkit and inequality verification harness")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("riesz", help="apply the potential to a field file")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.add_argument("--method", choices=("fft", "direct"), default="fft")
    p.set_defaults(func=_cmd_riesz)

    p = sub.add_parser("maximal", help="centered maximal function of a field")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.add_argument("--full-ladder", action="store_true")
    p.set_defaults(func=_cmd_maximal)

    p = sub.add_parser("morrey", help="Morrey constant scan of a weight")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--convention", choices=("avg", "raw"), default="avg")
    p.add_argument("--out", dest="outfile", default="")
    p.set_defaults(func=_cmd_morrey)

    p = sub.add_parser("fraclap", help="spectral fractional Laplacian")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.add_argument("--pad-factor", type=int, default=2)
    p.set_defaults(func=_cmd_fraclap)

    p = sub.add_parser("oracle-gate",
                       help="fast-path vs brute-force validation")
    p.add_argument("--n", type=int, default=64, help="d=1 grid size")
    p.add_argument("--n2", type=int, default=24, help="d=2 grid size")
    p.add_argument("--seeds", type=int, default=3)
    p.set_defaults(func=_cmd_oracle_gate)

    p = sub.add_parser("verify", help="run inequality checks")
    p.add_argument("check", help="check name or 'all'")
    p.add_argument("--config", default="")
    p.add_argument("--d", type=int, default=1,
                   help="built-in default config dimension (no --config)")
    p.add_argument("--morrey-convention", dest="morrey_convention",
                   choices=("avg", "raw"), default="",
                   help="override the ball-integral normalization")
    p.add_argument("--out", default="", help="JSON report path")
    p.add_argument("--csv", default="", help="CSV curves path")
    p.add_argument("--write-default-config", dest="wdc", default="",
                   help="write the built-in defaults to a file and exit")
    p.set_defaults(func=_cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        if getattr(args, "wdc", ""):
            write_config(default_config(args.d), args.wdc)
            return 0
        return args.func(args)
    except (ValueError, FieldFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
