"""Command-line front end: ``multipoint <verb> ...``.

Exit codes: 0 success, 1 failed verification, 2 usage or input error,
3 numerically singular contact matrix, 4 no bound state to analyze.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigurationError, ResonanceError, SingularityError
from .farfield import (
    alternating_charges,
    decay_profile,
    fibonacci_directions,
    fit_decay_exponent,
    multipole_report,
)
from .model import load_configuration, make_polygon, make_tetrahedron, save_configuration
from .reporting import csv_text, dumps, manifest
from .scattering import (
    IncidentWave,
    bound_state_solution,
    extract_contact_expansion,
    field_table,
    solve_scattering,
)
from .spectral import DEFAULT_RTOL, conjecture_scan, zero_energy_null_space

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_SINGULAR, EXIT_EMPTY = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


_DESTINATIONS = ("output", "grid_output", "multipoles")


def _params(args, destinations=False) -> dict:
    # inline manifests leave out where results were written, so the bytes do not depend on it
    skip = ("func",) if destinations else ("func",) + _DESTINATIONS
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _emit(text: str, path, args, rtol=None):
    if path is None:
        sys.stdout.write(text)
        return
    path = Path(path)
    path.write_text(text)
    sidecar = path.with_name(path.name + ".manifest.json")
    sidecar.write_text(dumps(manifest(args.command, _params(args, destinations=True), rtol, timestamp=True)))


def _read_config(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read configuration {path}: {exc.strerror}") from exc
    return load_configuration(text)


def _triple(text: str):
    try:
        v = [float(s) for s in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"expected x,y,z, got {text!r}") from exc
    if len(v) != 3:
        raise UsageError(f"expected x,y,z, got {text!r}")
    return v


def _grid(text: str) -> np.ndarray:
    """``x0:x1:nx,y0:y1:ny,z0:z1:nz`` -> points in C order (x slowest)."""
    try:
        axes = []
        for part in text.split(","):
            lo, hi, count = part.split(":")
            axes.append(np.linspace(float(lo), float(hi), int(count)))
    except ValueError as exc:
        raise UsageError(f"bad grid spec {text!r}; expected x0:x1:nx,y0:y1:ny,z0:z1:nz") from exc
    if len(axes) != 3:
        raise UsageError("grid spec needs three axes")
    X, Y, Z = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([X.ravel(), Y.ravel(), Z.ravel()])


def _incident(args) -> IncidentWave:
    if args.energy < 0:
        raise UsageError("energy must be >= 0 (negative energies are not supported)")
    if args.constant is not None:
        if args.energy != 0:
            raise UsageError("--constant is only valid at --energy 0")
        return IncidentWave.constant(args.constant)
    direction = _triple(args.dir) if args.dir else [0.0, 0.0, 1.0]
    return IncidentWave.plane_wave(direction, args.energy, normalize=True)


def cmd_gen(args):
    if args.kind == "tetrahedron":
        config = make_tetrahedron(args.edge)
    else:
        config = make_polygon(args.m, args.r0)
    _emit(save_configuration(config), args.output, args)
    return EXIT_OK


def _basis_report(basis):
    return {
        "multiplicity": basis.multiplicity,
        "basis": [list(v) for v in basis.basis],
        "singular_values": list(basis.singular_values),
        "rank_tolerance": basis.rank_tolerance,
        "sigma_min_retained": basis.sigma_min_retained,
        "sigma_max_discarded": basis.sigma_max_discarded,
        "margin": basis.margin,
    }


def cmd_boundstates(args):
    config = _read_config(args.config)
    basis = zero_energy_null_space(config, args.rtol)
    report = _basis_report(basis)
    report["manifest"] = manifest("boundstates", _params(args), args.rtol)
    _emit(dumps(report), args.output, args, args.rtol)
    return EXIT_OK


def cmd_scan(args):
    if args.m_max < 1:
        raise UsageError("--m-max must be >= 1")
    rows = conjecture_scan(args.m_max, args.r0, args.rtol, workers=args.threads)
    text = csv_text(
        ["m", "multiplicity", "sigma_min_retained", "sigma_max_discarded", "margin"],
        [(r.m, r.multiplicity, r.sigma_min_retained, r.sigma_max_discarded, r.margin) for r in rows],
    )
    _emit(text, args.output, args, args.rtol)
    return EXIT_OK


def cmd_scatter(args):
    config = _read_config(args.config)
    incident = _incident(args)
    sol = solve_scattering(config, incident)
    report = {
        "energy": incident.energy.value,
        "q_re": list(sol.q.real),
        "q_im": list(sol.q.imag),
        "source_re": list(sol.source.real),
        "source_im": list(sol.source.imag),
        "residual": sol.residual,
        "manifest": manifest("scatter", _params(args)),
    }
    _emit(dumps(report), args.output, args)
    if args.grid:
        table = field_table(sol, _grid(args.grid))
        text = csv_text(["x", "y", "z", "re_psi", "im_psi", "abs_psi"], table)
        if args.grid_output:
            Path(args.grid_output).write_text(text)
        else:
            sys.stdout.write(text)
    return EXIT_OK


def _decay_target(args):
    if args.polygon:
        try:
            m_text, r0_text = args.polygon.split(",")
            m, r0 = int(m_text), float(r0_text)
        except ValueError as exc:
            raise UsageError(f"--polygon expects m,r0, got {args.polygon!r}") from exc
        config = make_polygon(m, r0)
    elif args.config:
        config, m = _read_config(args.config), None
    else:
        raise UsageError("give a configuration file or --polygon m,r0")
    basis = zero_energy_null_space(config, args.rtol)
    if basis.multiplicity == 0:
        return config, None, m
    if not 0 <= args.index < basis.multiplicity:
        raise UsageError(f"--index must be below the multiplicity {basis.multiplicity}")
    q = basis.basis[args.index]
    if m is not None and basis.multiplicity == 1:
        alt = alternating_charges(m) / math.sqrt(2 * m)
        # the exact alternating charges avoid the O(eps/gap) error of the SVD vector
        if abs(q @ alt) > 1 - 1e-10:
            q = alt
    return config, q - q.mean(), m


def cmd_decay(args):
    config, q, m = _decay_target(args)
    if q is None:
        print("no bound state to analyze (multiplicity 0)", file=sys.stderr)
        return EXIT_EMPTY
    rho = float(np.linalg.norm(config.positions, axis=1).max()) or 1.0
    rmin = args.rmin if args.rmin is not None else 1e2 * rho
    rmax = args.rmax if args.rmax is not None else 1e4 * rho
    if not 0 < rmin < rmax:
        raise UsageError("need 0 < rmin < rmax")
    R = np.geomspace(rmin, rmax, args.nr)
    dirs = fibonacci_directions(args.ndirs)
    exponent = fit_decay_exponent(config, q, R, dirs)
    F = decay_profile(config, q, R, dirs)
    text = csv_text(["R", "F_R", "log_R", "log_F"], np.column_stack([R, F, np.log(R), np.log(F)]))
    _emit(text, args.output, args, args.rtol)
    print(f"fitted_exponent {exponent:.17g}", file=sys.stdout if args.output else sys.stderr)
    if args.multipoles:
        if m is None:
            raise UsageError("--multipoles needs --polygon")
        report = multipole_report(m, float(args.polygon.split(",")[1]), dirs=dirs, R_values=R)
        Path(args.multipoles).write_text(csv_text(["l", "theta", "phi", "C_l"], report.C_values))
    return EXIT_OK


def cmd_verify(args):
    config = _read_config(args.config)
    if args.boundstates:
        basis = zero_energy_null_space(config, args.rtol)
        if basis.multiplicity == 0:
            print("no bound state to verify (multiplicity 0)", file=sys.stderr)
            return EXIT_EMPTY
        solutions = [bound_state_solution(config, q) for q in basis.basis]
    else:
        solutions = [solve_scattering(config, _incident(args))]
    checks = []
    for k, sol in enumerate(solutions):
        for j in range(config.n):
            ce = extract_contact_expansion(sol, j)
            checks.append({
                "state": k, "scatterer": j,
                "pole_re": ce.pole_coeff.real, "pole_im": ce.pole_coeff.imag,
                "const_re": ce.const_coeff.real, "const_im": ce.const_coeff.imag,
                "residual": ce.residual,
            })
    worst = max(c["residual"] for c in checks)
    report = {"passed": worst <= args.tol, "tolerance": args.tol, "max_residual": worst,
              "checks": checks, "manifest": manifest("verify", _params(args), args.rtol)}
    _emit(dumps(report), args.output, args, args.rtol)
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="multipoint", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--threads", type=int, default=None, help="worker threads for sweeps")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an example configuration")
    gsub = g.add_subparsers(dest="kind", required=True)
    t = gsub.add_parser("tetrahedron")
    t.add_argument("--edge", type=float, default=1.0)
    t.add_argument("-o", "--output")
    pg = gsub.add_parser("polygon")
    pg.add_argument("--m", type=int, required=True)
    pg.add_argument("--r0", type=float, default=1.0)
    pg.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("boundstates", help="zero-energy bound states of a configuration")
    b.add_argument("config")
    b.add_argument("--rtol", type=float, default=DEFAULT_RTOL)
    b.add_argument("-o", "--output")
    b.set_defaults(func=cmd_boundstates)

    s = sub.add_parser("scan", help="multiplicity scan over the alternating 2m-gon")
    s.add_argument("--m-max", type=int, default=48)
    s.add_argument("--r0", type=float, default=1.0)
    s.add_argument("--rtol", type=float, default=DEFAULT_RTOL)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_scan)

    def incident_args(parser):
        parser.add_argument("--energy", type=float, default=0.0)
        mode = parser.add_mutually_exclusive_group()
        mode.add_argument("--dir", help="plane-wave direction x,y,z (normalized)")
        mode.add_argument("--constant", type=float, help="constant incident field (E = 0 only)")

    sc = sub.add_parser("scatter", help="solve for the scattered charges")
    sc.add_argument("config")
    incident_args(sc)
    sc.add_argument("--grid", help="x0:x1:nx,y0:y1:ny,z0:z1:nz")
    sc.add_argument("--grid-output")
    sc.add_argument("-o", "--output")
    sc.set_defaults(func=cmd_scatter)

    d = sub.add_parser("decay", help="fit the far-field decay exponent of a bound state")
    d.add_argument("config", nargs="?")
    d.add_argument("--polygon", help="m,r0 of the alternating 2m-gon")
    d.add_argument("--rmin", type=float)
    d.add_argument("--rmax", type=float)
    d.add_argument("--nr", type=int, default=21)
    d.add_argument("--ndirs", type=int, default=64)
    d.add_argument("--index", type=int, default=0, help="which basis vector to analyze")
    d.add_argument("--rtol", type=float, default=DEFAULT_RTOL)
    d.add_argument("--multipoles", help="also write the C_l table (polygon only)")
    d.add_argument("-o", "--output")
    d.set_defaults(func=cmd_decay)

    v = sub.add_parser("verify", help="check the contact conditions at every scatterer")
    v.add_argument("config")
    v.add_argument("--boundstates", action="store_true", help="verify the zero-energy bound states")
    incident_args(v)
    v.add_argument("--rtol", type=float, default=DEFAULT_RTOL)
    v.add_argument("--tol", type=float, default=1e-6)
    v.add_argument("-o", "--output")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ResonanceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except (UsageError, ConfigurationError, SingularityError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
