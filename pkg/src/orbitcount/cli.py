"""Batch command-line front end.

Every pipeline is a subcommand taking a JSON config; outputs are
canonical JSON (exact values as rational strings, never floats for
exact data) plus optional CSV for sweep tables.  Runs are reproducible:
identical config and seed give bit-identical output for any --threads.

Exit codes: 0 success, 1 input error, 2 certification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from typing import List, Optional

from .dynamics import (CertificationError, VectorField, certify_radius,
                       trajectory_series)
from .polynomial import Polynomial
from .polyparse import PolyParseError, parse_polynomial, parse_scalar
from .scalars import gaussian_str
from .zerocount import DiscFunction, IdenticallyZeroError


class InputError(ValueError):
    pass


def _load_schema():
    with resources.files("orbitcount").joinpath("schemas/config.schema.json").open() as fh:
        return json.load(fh)


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read config {path}: {e}")
    try:
        import jsonschema

        jsonschema.validate(config, _load_schema())
    except ImportError:
        pass
    except Exception as e:
        raise InputError(f"config does not match the schema: {e}")
    return config


def build_system(config: dict) -> VectorField:
    spec = config.get("system")
    if not spec:
        raise InputError("config needs a 'system' entry")
    if "file" in spec:
        with open(spec["file"]) as fh:
            return VectorField.from_json(json.load(fh))
    if "constructor" in spec:
        return _construct_system(spec["constructor"])
    if "components" in spec:
        names = tuple(spec.get("variables") or
                      [f"x{i+1}" for i in range(len(spec["components"]))])
        comps = [parse_polynomial(s, names) for s in spec["components"]]
        return VectorField(comps, names)
    raise InputError("system must give components, a file, or a constructor")


def _construct_system(ctor: dict) -> VectorField:
    from .systems import (RationalFunction, RationalMatrixODE, jfunction_field,
                          linear_system_field, translates_field)

    name = ctor.get("name")
    if name == "linear_system":
        matrix = ctor.get("matrix")
        if not matrix:
            raise InputError("linear_system needs a 'matrix' of entry strings")
        return linear_system_field(RationalMatrixODE.parse(matrix))
    if name == "jfunction":
        return jfunction_field()
    if name == "translates":
        funcs = ctor.get("functions")
        if not funcs:
            raise InputError("translates needs a 'functions' list")
        return translates_field([RationalFunction.parse(s) for s in funcs])
    raise InputError(f"unknown constructor {name!r}")


def parse_point(config: dict, xi: VectorField):
    pt = config.get("point")
    if pt is None:
        raise InputError("config needs a 'point' entry")
    if len(pt) != xi.n:
        raise InputError(f"point has {len(pt)} coordinates, field needs {xi.n}")
    return [parse_scalar(s) for s in pt]


def build_trajectory(config: dict, xi: VectorField):
    p = parse_point(config, xi)
    order = int(config.get("germ_order", 40))
    radius = config.get("radius", 2.0)
    germ = trajectory_series(xi, p, order)
    return certify_radius(germ, float(radius))


def emit(args, payload: dict, csv_text: Optional[str] = None) -> None:
    text = json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"
    if args.format == "csv" and csv_text is not None:
        text = csv_text
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _task(config: dict) -> dict:
    return config.get("task", {})


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_zeros(args, config):
    xi = build_system(config)
    traj = build_trajectory(config, xi)
    task = _task(config)
    if "polynomial" not in task:
        raise InputError("zeros task needs a 'polynomial'")
    P = parse_polynomial(task["polynomial"], xi.names)
    from .zerocount import count_zeros, jensen_bound

    f = DiscFunction(traj, P)
    res = count_zeros(f, args.precision_bits)
    payload = res.to_json()
    if task.get("jensen", False):
        payload["jensen_bound"] = jensen_bound(f, traj.radius, args.precision_bits)
    emit(args, payload)


def cmd_growth(args, config):
    xi = build_system(config)
    traj = build_trajectory(config, xi)
    task = _task(config)
    degrees = task.get("degrees") or list(range(1, 9))
    samples = int(task.get("samples", 20))
    from .zerocount import main_theorem_harness

    table = main_theorem_harness(xi, traj, degrees, samples, args.seed,
                                 precision=int(task.get("precision", 53)),
                                 threads=args.threads)
    emit(args, table.to_json(), table.to_csv())


def cmd_orbit_ideal(args, config):
    xi = build_system(config)
    p = parse_point(config, xi)
    task = _task(config)
    d = int(task.get("degree", 2))
    from .orbitideal import ideal_slice, leading_diagram

    sl = ideal_slice(xi, p, d)
    dg = leading_diagram(sl)
    payload = {
        "degree": d,
        "nu": sl.nu,
        "basis": [str(Q) for Q in sl.basis],
        "diagram_generators": sorted(list(g) for g in dg.generators),
        "kappa": dg.kappa,
        "rho": dg.rho(d),
    }
    emit(args, payload)


def cmd_minors(args, config):
    xi = build_system(config)
    p = parse_point(config, xi)
    task = _task(config)
    d = int(task.get("degree", 1))
    from .dynamics import morse_multiplicity_cap
    from .elimination import ALL_ZERO, build_elimination_matrix, max_minor_at_point
    from .orbitideal import ideal_slice, leading_diagram

    sl = ideal_slice(xi, p, d)
    dg = leading_diagram(sl)
    mu = int(task.get("mu", morse_multiplicity_cap(xi.n, max(d, 1), max(xi.delta, 1))))
    mu = max(mu, dg.rho(d))
    matrix = build_elimination_matrix(xi, dg, d, mu)
    outcome, witness = max_minor_at_point(matrix, p, seed=args.seed)
    payload = {
        "rows": [list(m) for m in matrix.rows],
        "mu": mu,
        "entry_profile": matrix.entry_profile(),
    }
    if outcome == ALL_ZERO:
        payload["verdict"] = "all zero"
        payload["kernel_witness"] = str(witness) if witness is not None else None
    else:
        payload["verdict"] = "nonzero minor"
        payload["certificate"] = json.loads(outcome.to_json())
    emit(args, payload)


def cmd_lower_bound(args, config):
    xi = build_system(config)
    p = parse_point(config, xi)
    task = _task(config)
    if "polynomial" not in task:
        raise InputError("lower-bound task needs a 'polynomial'")
    P = parse_polynomial(task["polynomial"], xi.names)
    d = int(task.get("degree", max(P.degree(), 1)))
    mu = task.get("mu")
    from .elimination import PipelineError, universal_lower_bound

    try:
        res = universal_lower_bound(xi, p, P, d,
                                    mu=int(mu) if mu is not None else None,
                                    seed=args.seed)
    except PipelineError as e:
        raise CertificationError(str(e))
    payload = {
        "degenerate": res["degenerate"],
        "R": str(res["R"]),
        "k": res["k"],
    }
    if not res["degenerate"]:
        payload.update({
            "mu": res["mu"],
            "certificate": json.loads(res["certificate"].to_json()),
            "envelope": res["envelope"],
            "measured_gap": res["measured_gap"],
        })
    emit(args, payload)


def cmd_lojas(args, config):
    task = _task(config)
    names = tuple(task.get("variables") or ["x", "y"])
    polys = [parse_polynomial(s, names) for s in task.get("polynomials", [])]
    if not polys:
        raise InputError("lojas task needs 'polynomials'")
    point = [complex(*map(float, c)) if isinstance(c, list) else complex(parse_scalar(str(c)).to_complex())
             for c in task.get("point", [])]
    if len(point) != len(names):
        raise InputError("lojas point dimension mismatch")
    from .elimination import lojasiewicz_check

    rep = lojasiewicz_check(polys, point, seed=args.seed)
    emit(args, rep)


def _census_pair(config, xi, traj, args):
    task = _task(config)
    p1 = parse_polynomial(task.get("p1", xi.names[0]), xi.names)
    p2 = parse_polynomial(task.get("p2", xi.names[1]), xi.names)
    return DiscFunction(traj, p1), DiscFunction(traj, p2)


def cmd_points(args, config):
    xi = build_system(config)
    traj = build_trajectory(config, xi)
    task = _task(config)
    H = int(task.get("H", 10))
    from .ratpoints import census

    phi1, phi2 = _census_pair(config, xi, traj, args)
    result = census(phi1, phi2, H, precision=args.precision_bits,
                    threads=args.threads)
    emit(args, result.to_json())


def cmd_masser(args, config):
    xi = build_system(config)
    traj = build_trajectory(config, xi)
    task = _task(config)
    sweep = task.get("H_sweep") or [4, 16, 64]
    from .ratpoints import masser_check

    phi1, phi2 = _census_pair(config, xi, traj, args)
    rep = masser_check(phi1, phi2, sweep, precision=args.precision_bits,
                       threads=args.threads)
    csv_text = "H,members,undecided,w,fit\n" + "".join(
        f"{r['H']},{r['members']},{r['undecided']},{r['w']},{r['fit']}\n"
        for r in rep["rows"])
    emit(args, rep, csv_text)


def cmd_density(args, config):
    xi = build_system(config)
    traj = build_trajectory(config, xi)
    task = _task(config)
    sweep = task.get("H_sweep") or [10, 100]
    kappa = int(task.get("kappa", 2))
    m = int(task.get("m", xi.n))
    from .ratpoints import density_check

    phi1, phi2 = _census_pair(config, xi, traj, args)
    rep = density_check(phi1, phi2, sweep, kappa, m,
                        precision=args.precision_bits,
                        curve_cutoff=int(task.get("cutoff", 8)),
                        threads=args.threads)
    csv_text = "H,N,undecided,envelope,fit\n" + "".join(
        f"{r['H']},{r['N']},{r['undecided']},{r['envelope']},{r['fit']}\n"
        for r in rep["rows"])
    emit(args, rep, csv_text)


def cmd_darboux(args, config):
    xi = build_system(config)
    task = _task(config)
    N = int(task.get("N", 2))
    from .systems import (darboux_curves, first_integral_from_curves,
                          jouanolou_threshold)

    res = darboux_curves(xi, N, seed=args.seed)
    payload = {
        "curves": [{"f": str(c.f), "cofactor": str(c.cofactor)} for c in res.curves],
        "partial": res.partial,
        "notes": res.notes,
        "jouanolou_threshold": jouanolou_threshold(max(xi.delta, 1)),
    }
    fi = first_integral_from_curves(res.curves, xi)
    if fi is not None:
        payload["first_integral"] = {"numerator": str(fi[0]),
                                     "denominator": str(fi[1])}
    emit(args, payload)


def cmd_pade(args, config):
    task = _task(config)
    from .rationality import (TaylorPrefix, pade_solve, rationality_conditions,
                              reconstruct, uniform_degree_scan)

    if "family" in task:
        d_max = int(task.get("d_max", 3))
        family = {k: TaylorPrefix.from_strings(v)
                  for k, v in sorted(task["family"].items())}
        rep = uniform_degree_scan(family, d_max, threads=args.threads)
        emit(args, rep)
        return
    coeffs = task.get("coefficients")
    if coeffs is None and "coefficients_file" in task:
        with open(task["coefficients_file"]) as fh:
            coeffs = [line.strip() for line in fh if line.strip()]
    if not coeffs:
        raise InputError("pade task needs coefficients")
    prefix = TaylorPrefix.from_strings([str(c) for c in coeffs])
    d = int(task.get("degree", 1))
    mode = task.get("mode", "solve")
    if mode == "reconstruct":
        pair = reconstruct(prefix, d)
        payload = {"success": pair is not None}
        if pair is not None:
            payload.update(pair.to_json())
    elif mode == "conditions":
        N = int(task.get("N", min(len(prefix), 3 * d + 1)))
        payload = {"rational": rationality_conditions(prefix, d, N), "N": N,
                   "degree": d}
    else:
        N = int(task.get("N", min(len(prefix), 3 * d + 1)))
        pair = pade_solve(prefix, d, N)
        payload = {"nontrivial": pair is not None, "N": N, "degree": d}
        if pair is not None:
            payload.update(pair.to_json())
    emit(args, payload)


def cmd_systems_make(args, config):
    xi = build_system(config)
    payload = xi.to_json()
    emit(args, payload)


COMMANDS = {
    "zeros": cmd_zeros,
    "growth": cmd_growth,
    "orbit-ideal": cmd_orbit_ideal,
    "minors": cmd_minors,
    "lower-bound": cmd_lower_bound,
    "lojas": cmd_lojas,
    "points": cmd_points,
    "masser": cmd_masser,
    "density": cmd_density,
    "darboux": cmd_darboux,
    "pade": cmd_pade,
    "systems-make": cmd_systems_make,
}


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orbitcount",
        description="certified zero counting and orbit diagnostics for "
                    "polynomial vector fields")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--precision-bits", type=int, default=128)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=["json", "csv"], default="json")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        COMMANDS[args.command](args, config)
    except (InputError, PolyParseError, ValueError, IdenticallyZeroError) as e:
        sys.stderr.write(f"input error: {e}\n")
        return 1
    except CertificationError as e:
        sys.stderr.write(f"certification failure: {e}\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
