"""Command line entry point ``escreg``.

Exit codes: 0 success, 2 integration diverged, 3 invalid configuration.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys

import numpy as np

from .errors import ConfigError, IntegrationDiverged
from .experiments import at_omega, deviation, sweep
from .oracle import harmonic_table
from .scenario import build_scenario, load_config, steady_state
from .sim import integrate, ultimate_bound

log = logging.getLogger("escreg")

EXIT_DIVERGED = 2
EXIT_CONFIG = 3


def fmt(x) -> str:
    return f"{float(x):.9g}"


def write_csv(path: str, header: list[str], rows) -> None:
    out = sys.stdout if path == "-" else open(path, "w", newline="")
    try:
        writer = csv.writer(out, lineterminator="\r\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) if isinstance(v, (float, int, np.floating)) else v for v in row])
    finally:
        if out is not sys.stdout:
            out.close()


def parse_omegas(text: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse omegas {text!r}") from None
    if not vals or any(v <= 0 for v in vals):
        raise ConfigError("omegas must be a comma-separated list of positive numbers")
    return vals


def _scenario(args):
    config = load_config(args.scenario) if args.scenario else {}
    return build_scenario(config)


def cmd_run(args) -> None:
    sc = _scenario(args)
    traj = integrate(sc, full_rate=args.full_rate)
    n = sc.model.n
    header = ["t", "e", "y", "v1", "v2", "z1", "z2"] + [f"eta{i + 1}" for i in range(n)] + ["pi"] \
        + [f"vt{i + 1}" for i in range(n)] + ["u"]
    cols = [traj.times] + [traj[name] for name in header[1:]]
    write_csv(args.out, header, zip(*cols))
    log.info("ultimate bound of |e| (tail 20%%): %.4g", ultimate_bound(traj, "e"))


def cmd_sweep(args) -> None:
    sc = _scenario(args)
    rows = sweep(sc, parse_omegas(args.omegas), args.tail)
    keys = ["omega", "ultimate_bound_e", "sup_dev_vs_averaged", "vartheta_err_final"]
    write_csv(args.out, keys, ([r[k] for k in keys] for r in rows))


def cmd_verify_averaging(args) -> None:
    sc = _scenario(args)
    omegas = parse_omegas(args.omegas)
    rows = []
    for omega in omegas:
        scw = at_omega(sc, omega)
        if args.T is not None:
            from dataclasses import replace

            scw = replace(scw, T=args.T)
        rows.append(deviation(scw, full_rate=args.full_rate))
    keys = ["omega", "sup_deviation", "final_deviation"]
    write_csv(args.out, keys, ([r[k] for k in keys] for r in rows))


def cmd_oracle_dump(args) -> None:
    sc = _scenario(args)
    table = harmonic_table(steady_state(sc))
    write_csv(args.out, ["signal", "index", "omega", "cos", "sin"],
              ([r["signal"], r["index"], r["omega"], r["cos"], r["sin"]] for r in table))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="escreg", description="Extremum-seeking output regulator simulations")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--scenario", help="scenario JSON (defaults to the built-in benchmark)")
        sp.add_argument("--out", default="-", help="output CSV path, '-' for stdout")

    r = sub.add_parser("run", help="simulate one scenario")
    common(r)
    r.add_argument("--full-rate", action="store_true", help="record every integration step")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="ultimate bounds over dither frequencies")
    common(s)
    s.add_argument("--omegas", default="50,100,200,400")
    s.add_argument("--tail", type=float, default=0.2)
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify-averaging", help="dithered vs averaged deviation per omega")
    common(v)
    v.add_argument("--omegas", default="100,400,1600")
    v.add_argument("--T", type=float, default=None, help="horizon override in seconds")
    v.add_argument("--full-rate", action="store_true")
    v.set_defaults(func=cmd_verify_averaging)

    o = sub.add_parser("oracle", help="steady-state oracle tools")
    osub = o.add_subparsers(dest="oracle_command", required=True)
    d = osub.add_parser("dump", help="harmonic table of the steady-state signals")
    common(d)
    d.set_defaults(func=cmd_oracle_dump)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except ConfigError as exc:
        log.error("invalid configuration: %s", exc)
        return EXIT_CONFIG
    except IntegrationDiverged as exc:
        log.error("integration diverged: %s", exc)
        return EXIT_DIVERGED
    return 0


if __name__ == "__main__":
    sys.exit(main())
