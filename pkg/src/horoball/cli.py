"""Command-line front end.

Subcommands::

    horoball iterate  --config CFG [--out trace.csv] [--seed N]
    horoball classify --config CFG [--out report.json] [--seed N]
    horoball rates    --config CFG [--out rates.csv] [--seed N]
    horoball verify   [--suite all] [--seed 42] [--dims 1,2,3,8] [--out report.txt]

Config files are UTF-8 JSON::

    {
      "dimension": 2,
      "map": {...},                 # see horoball.maps for the schema
      "tau": [[1, 0], [0, 0]],      # optional unit vector
      "z0": [[[0, 0], [0, 0]]],     # list of start points
      "n_max": 100,
      "seed": 0,
      "tolerances": {"eps_fix": 1e-11, "eps_sink": 1e-8, "eps_rate": 1e-7},
      "output_path": "trace.csv",
      "beta": 1.0, "k": 2.0, "m": 1.0   # optional rate/horosphere data
    }

Complex numbers are ``[re, im]`` pairs.  ``iterate`` and ``rates`` follow
the first start point; ``classify`` uses all of them.

Trace CSV columns: ``n, re_1, im_1, ..., re_d, im_d, norm, d_to_tau,
rho_step, alpha_bound``.  Rates CSV columns: ``n, d_to_tau, alpha_bound,
ratio``.  Floats carry 17 significant digits.

Exit codes: 0 success, 1 bad config or arguments, 2 numerical failure,
3 invariant violated.
"""

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np

from . import dynamics, suites
from .ball import GeometryError, check_ball_point, check_boundary_point
from .analysis import RadialLimitError
from .maps import MapSpecError, SelfMap, dumps_canonical, map_from_dict, parse_vector, sink_certificate

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_INVARIANT = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    dimension: int
    map: SelfMap
    z0: np.ndarray
    tau: np.ndarray = None
    n_max: int = 100
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    output_path: str = None
    beta: float = None
    k: float = None
    m: float = None


TOLERANCE_KEYS = ("eps_fix", "eps_sink", "eps_rate")


def _positive_int(value, name):
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise ConfigError(f"{name}: expected a non-negative integer")
    return value


def _optional_float(raw, name):
    if name not in raw or raw[name] is None:
        return None
    try:
        return float(raw[name])
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: expected a number") from None


def parse_config(raw):
    if not isinstance(raw, dict):
        raise ConfigError("config: expected a JSON object")
    for key in ("dimension", "map", "z0"):
        if key not in raw:
            raise ConfigError(f"{key}: missing")
    dim = _positive_int(raw["dimension"], "dimension")
    if dim < 1:
        raise ConfigError("dimension: must be at least 1")
    try:
        F = map_from_dict(raw["map"])
    except MapSpecError as exc:
        raise ConfigError(str(exc)) from None
    if F.dim is not None and F.dim != dim:
        raise ConfigError(f"map: dimension {F.dim} does not match dimension {dim}")

    if not isinstance(raw["z0"], list) or not raw["z0"]:
        raise ConfigError("z0: expected a non-empty list of points")
    starts = []
    for i, pt in enumerate(raw["z0"]):
        try:
            v = check_ball_point(parse_vector(pt, f"z0[{i}]"))
        except MapSpecError as exc:
            raise ConfigError(str(exc)) from None
        except GeometryError as exc:
            raise ConfigError(f"z0[{i}]: {exc}") from None
        if v.shape[0] != dim:
            raise ConfigError(f"z0[{i}]: expected {dim} components")
        starts.append(v)

    tau = None
    if raw.get("tau") is not None:
        try:
            tau = check_boundary_point(parse_vector(raw["tau"], "tau"))
        except MapSpecError as exc:
            raise ConfigError(str(exc)) from None
        except GeometryError as exc:
            raise ConfigError(f"tau: {exc}") from None
        if tau.shape[0] != dim:
            raise ConfigError(f"tau: expected {dim} components")

    tolerances = raw.get("tolerances") or {}
    if not isinstance(tolerances, dict):
        raise ConfigError("tolerances: expected an object")
    for key, value in tolerances.items():
        if key not in TOLERANCE_KEYS:
            raise ConfigError(f"tolerances.{key}: unknown tolerance")
        if isinstance(value, bool) or not isinstance(value, (int, float)) or value <= 0:
            raise ConfigError(f"tolerances.{key}: expected a positive number")

    n_max = _positive_int(raw.get("n_max", 100), "n_max")
    if n_max < 1:
        raise ConfigError("n_max: must be at least 1")
    output = raw.get("output_path")
    if output is not None and not isinstance(output, str):
        raise ConfigError("output_path: expected a string")
    return ExperimentConfig(
        dimension=dim,
        map=F,
        z0=np.array(starts),
        tau=tau,
        n_max=n_max,
        seed=_positive_int(raw.get("seed", 0), "seed"),
        tolerances={k: float(v) for k, v in tolerances.items()},
        output_path=output,
        beta=_optional_float(raw, "beta"),
        k=_optional_float(raw, "k"),
        m=_optional_float(raw, "m"),
    )


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_config(raw)


def write_atomic(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".horoball-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(x):
    return f"{float(x):.17g}"


def _config_from_args(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.output_path = args.out
    return cfg


def _iterate_kwargs(cfg):
    kw = {"tau": cfg.tau, "n_max": cfg.n_max}
    for key in ("eps_fix", "eps_sink"):
        if key in cfg.tolerances:
            kw[key] = cfg.tolerances[key]
    return kw


def cmd_iterate(args, out=sys.stdout):
    cfg = _config_from_args(args)
    tr = dynamics.iterate(cfg.map, cfg.z0[0], **_iterate_kwargs(cfg))
    alpha = None
    cert = sink_certificate(cfg.map)
    if cert is not None and tr.tau is not None and np.linalg.norm(cert.tau - tr.tau) <= 1e-9:
        params = dynamics.rate_params_for(tr, cert.beta, cert.k)
        alpha = dynamics.rate_bound(params, np.arange(len(tr.iterates)))
    if cfg.output_path:
        write_atomic(cfg.output_path, tr.to_csv(alpha))
    final_d = _fmt(tr.d_to_tau[-1]) if tr.d_to_tau is not None else "nan"
    print(f"outcome={tr.stop_reason} steps={tr.steps} final_d_to_tau={final_d}", file=out)
    return EXIT_OK


def cmd_classify(args, out=sys.stdout):
    cfg = _config_from_args(args)
    ccfg = dynamics.ClassifyConfig(
        starts=cfg.z0,
        n_max=cfg.n_max,
        tau=cfg.tau,
        m=cfg.m,
        seed=cfg.seed,
    )
    if "eps_fix" in cfg.tolerances:
        ccfg.eps_fix = cfg.tolerances["eps_fix"]
    result = dynamics.classify(cfg.map, ccfg)
    text = dumps_canonical(dynamics.classification_to_dict(result)) + "\n"
    if cfg.output_path:
        write_atomic(cfg.output_path, text)
    out.write(text)
    return EXIT_OK


def cmd_rates(args, out=sys.stdout):
    cfg = _config_from_args(args)
    cert = sink_certificate(cfg.map)
    tau = cfg.tau if cfg.tau is not None else (cert.tau if cert else None)
    beta = cfg.beta if cfg.beta is not None else (cert.beta if cert else None)
    k = cfg.k if cfg.k is not None else (cert.k if cert else None)
    if tau is None or beta is None or k is None:
        raise ConfigError("map: no sink certificate; supply tau, beta and k in the config")
    if cert is not None and cfg.tau is not None and np.linalg.norm(cert.tau - cfg.tau) > 1e-9:
        raise ConfigError("tau: does not match the map's sink point")
    kw = _iterate_kwargs(cfg)
    kw["tau"] = tau
    tr = dynamics.iterate(cfg.map, cfg.z0[0], **kw)
    try:
        params = dynamics.rate_params_for(tr, beta, k)
    except ValueError as exc:
        raise ConfigError(f"beta/k: {exc}") from None
    report = dynamics.verify_rate(tr, params, cfg.tolerances.get("eps_rate", dynamics.EPS_RATE))
    lines = ["n,d_to_tau,alpha_bound,ratio"]
    for n, (d, al, ratio) in enumerate(zip(tr.d_to_tau, report.alpha, report.ratios)):
        lines.append(f"{n},{_fmt(d)},{_fmt(al)},{_fmt(ratio)}")
    text = "\n".join(lines) + "\n"
    if cfg.output_path:
        write_atomic(cfg.output_path, text)
    eps = cfg.tolerances.get("eps_rate", dynamics.EPS_RATE)
    worst = float(np.max(report.ratios))
    ok = worst <= 1.0 + eps
    print(f"rates steps={tr.steps} max_ratio={_fmt(worst)} {'PASS' if ok else 'FAIL'}", file=out)
    return EXIT_OK if ok else EXIT_INVARIANT


def parse_dims(text):
    try:
        dims = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"--dims: cannot parse {text!r}") from None
    if not dims or any(d < 1 for d in dims):
        raise ConfigError("--dims: expected a comma-separated list of positive integers")
    return dims


def cmd_verify(args, out=sys.stdout):
    suite = args.suite
    if suite != "all" and suite not in suites.SUITES:
        raise ConfigError(f"--suite: unknown suite {suite!r} (choose from all, {', '.join(suites.SUITES)})")
    dims = parse_dims(args.dims)
    seed = 42 if args.seed is None else args.seed
    results = suites.run(suite, seed, dims)
    text = suites.format_report(results, seed, dims)
    if args.out:
        write_atomic(args.out, text)
    out.write(text)
    return EXIT_OK if all(r.passed for r in results) else EXIT_INVARIANT


COMMANDS = {
    "iterate": cmd_iterate,
    "classify": cmd_classify,
    "rates": cmd_rates,
    "verify": cmd_verify,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="horoball", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("iterate", "classify", "rates"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out")
        p.add_argument("--seed", type=int)
    p = sub.add_parser("verify")
    p.add_argument("--suite", default="all")
    p.add_argument("--seed", type=int)
    p.add_argument("--dims", default="1,2,3,8")
    p.add_argument("--out")
    return parser


def main(argv=None, out=sys.stdout, err=sys.stderr):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    if getattr(args, "seed", None) is not None and args.seed < 0:
        print("error: --seed must be non-negative", file=err)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](args, out=out)
    except ConfigError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_CONFIG
    except (GeometryError, RadialLimitError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=err)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
