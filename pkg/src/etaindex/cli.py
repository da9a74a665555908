"""Command-line driver.

``etaindex run`` executes a named scenario from a JSON config file and emits
an RFC-4180-style CSV table (stdout by default); ``etaindex suite`` runs a
named acceptance group and prints one pass/fail line per check.  Exit codes:
0 success, 2 validation/config error, 3 computation error (the library error
name is echoed), and 1 for a suite with failing checks.

Normalization: the circle is scaled so that first-order mode spacing is 1.
A cylinder whose tangential eigenvalues are ``tau + 2 pi n`` (circumference
normalized to spacing ``2 pi``) maps onto these models by dividing all
eigenvalues by ``2 pi``, i.e. ``lattice scale 1, offset tau / (2 pi)``.
Indices, spectral flow, and eta values are unchanged by that rescaling.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .acceptance import SUITES, run_suite
from .apsindex import (
    ApsConventions,
    aps_index,
    inv_invariant,
    lattice_cylinder,
    lift_problem,
    modn_index,
)
from .defaults import GAP_TOL, KERNEL_TOL, MODE_WINDOW
from .errors import ConfigParseError, EtaIndexError, UnknownSuite
from .etazeta import (
    LatticePath,
    eta_decomposition,
    eta_invariant,
    zeta_check,
)
from .opmodel import (
    CoverConfig,
    ModelOperator,
    family_from_curves,
    lattice_operator,
    pullback_cover,
    pushforward_trivial,
    twist_flat,
    LatticeSpectrumModel,
)
from .seeley import DiffSymbol, TrigPoly, local_zeta, parity_report
from .specflow import loop_spectral_flow, spectral_flow

_EPILOG = """\
conventions:
  Lattice models use unit mode spacing: the first-order model operator on
  the circle has spectrum scale * (Z + offset).  For data normalized to a
  circle of circumference 2*pi with eigenvalues tau + 2*pi*n, divide by
  2*pi (scale 1, offset tau/(2*pi)); integer invariants are unaffected.

config file (JSON):
  {"scenarios": {"name": {"command": "eta", "operator": {...}, ...}}}
  commands: eta zeta sf loop-sf aps modn inv seeley-zeta decomposition suite
"""


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _need(d: dict, key: str, where: str):
    if key not in d:
        raise ConfigParseError(f"{where}: missing key {key!r}")
    return d[key]


def _build_operator(d: dict, where: str) -> ModelOperator:
    if not isinstance(d, dict):
        raise ConfigParseError(f"{where}: operator must be an object")
    kind = d.get("type", "lattice")
    if kind == "lattice":
        if "offsets" in d:
            model = LatticeSpectrumModel(
                scale=float(d.get("scale", 1.0)),
                offsets=tuple(float(t) for t in d["offsets"]),
                power=int(d.get("power", 1)),
                removed=tuple(float(v) for v in d.get("removed", ())),
                added=tuple(float(v) for v in d.get("added", ())),
                definite=int(d.get("definite", 0)),
            )
            op = lattice_operator(model.scale, model.offsets[0], model.power)
            return ModelOperator(lattice=model, meta=op.meta)
        op = lattice_operator(
            float(d.get("scale", 1.0)),
            float(_need(d, "offset", where)),
            int(d.get("power", 1)),
        )
        if d.get("removed") or d.get("added") or d.get("definite"):
            from dataclasses import replace

            model = replace(
                op.lattice,
                removed=tuple(float(v) for v in d.get("removed", ())),
                added=tuple(float(v) for v in d.get("added", ())),
                definite=int(d.get("definite", 0)),
            )
            return ModelOperator(lattice=model, meta=op.meta)
        return op
    if kind == "pullback":
        base = _build_operator(_need(d, "base", where), where)
        return pullback_cover(base, CoverConfig(int(_need(d, "sheets", where))))
    if kind == "pushforward":
        base = _build_operator(_need(d, "base", where), where)
        return pushforward_trivial(base, int(_need(d, "copies", where)))
    if kind == "twist":
        base = _build_operator(_need(d, "base", where), where)
        return twist_flat(base, float(_need(d, "holonomy", where)))
    raise ConfigParseError(f"{where}: unknown operator type {kind!r}")


def _build_family(d: dict, where: str, loop: bool):
    if not isinstance(d, dict):
        raise ConfigParseError(f"{where}: family must be an object")
    if d.get("type", "curves") == "lattice_shift":
        window = int(_need(d, "window", where))
        grid = [float(t) for t in _need(d, "grid", where)]
        shift = [float(v) for v in _need(d, "shift_values", where)]
        if len(shift) != len(grid):
            raise ConfigParseError(f"{where}: shift_values must align with grid")
        curves = [[n + s for s in shift] for n in range(-window, window + 1)]
        return family_from_curves(grid, curves, loop=d.get("loop", loop))
    grid = [float(t) for t in _need(d, "grid", where)]
    curves = _need(d, "curves", where)
    return family_from_curves(grid, curves, loop=bool(d.get("loop", loop)))


def _build_conventions(d: dict) -> ApsConventions:
    return ApsConventions(
        near_includes_zero=bool(d.get("near_includes_zero", True)),
        far_flip=bool(d.get("far_flip", True)),
        far_includes_zero=bool(d.get("far_includes_zero", True)),
    )


def _build_symbol(d: dict, where: str) -> DiffSymbol:
    order = int(_need(d, "order", where))
    coefs: dict[int, TrigPoly] = {}
    for term in _need(d, "terms", where):
        j = int(_need(term, "xi_power", where))
        modes = {}
        for k, pair in _need(term, "fourier_coeffs", where).items():
            re, im = (pair, 0.0) if isinstance(pair, (int, float)) else (pair[0], pair[1])
            modes[int(k)] = complex(float(re), float(im))
        tp = TrigPoly({k: v for k, v in modes.items()})
        coefs[j] = (coefs[j] + tp) if j in coefs else tp
    return DiffSymbol(order=order, coefs=coefs)


def _sweep_values(sc: dict, key: str, fallback) -> list[float]:
    sweep = sc.get("sweep", {})
    if key in sweep:
        return sorted(float(v) for v in sweep[key])
    return [float(fallback)]


# --------------------------------------------------------------------------
# scenario execution
# --------------------------------------------------------------------------

def execute_scenario(name: str, sc: dict, opts) -> tuple[list[str], list[list[str]]]:
    where = f"scenario {name!r}"
    command = _need(sc, "command", where)

    if command in ("eta", "zeta"):
        op_spec = dict(_need(sc, "operator", where))
        offsets = _sweep_values(sc, "offset", op_spec.get("offset", 0.0))
        rows = []
        for t in offsets:
            spec = dict(op_spec)
            if "offset" in spec or "sweep" in sc:
                spec["offset"] = t
            op = _build_operator(spec, where)
            if command == "eta":
                r = eta_invariant(op, method=sc.get("method", "closed-form"))
                rows.append([_fmt(t), _fmt(r.eta), _fmt(r.eta_at_zero),
                             _fmt(r.kernel_dim), r.method, _fmt(r.err_bound)])
            else:
                z = zeta_check(op)
                rows.append([_fmt(t), _fmt(z.zeta_at_zero), _fmt(z.kernel_dim),
                             _fmt(z.heat_invariant)])
        headers = (
            ["offset", "eta", "eta_at_zero", "kernel_dim", "method", "err_bound"]
            if command == "eta"
            else ["offset", "zeta_at_zero", "kernel_dim", "heat_invariant"]
        )
        return headers, rows

    if command == "sf":
        fam = _build_family(_need(sc, "family", where), where, loop=False)
        rep = spectral_flow(fam, gap_tol=opts.gap_tol)
        return ["sf", "segments"], [[_fmt(rep.value), _fmt(len(rep.partition.taus) - 1)]]

    if command == "loop-sf":
        fam = _build_family(_need(sc, "family", where), where, loop=True)
        return ["loop_sf"], [[_fmt(loop_spectral_flow(fam, gap_tol=opts.gap_tol))]]

    if command == "aps":
        window = int(sc.get("window", opts.mode_window))
        chi_grid = [float(t) for t in _need(sc, "chi_grid", where)]
        chi_values = [float(v) for v in _need(sc, "chi_values", where)]
        conv = _build_conventions(sc.get("conventions", {}))
        taus = _sweep_values(sc, "tau", sc.get("tau", 0.0))
        rows = []
        for tau in taus:
            prob = lattice_cylinder(
                window, chi_grid, [tau * v for v in chi_values], conventions=conv
            )
            rows.append([_fmt(tau), _fmt(aps_index(prob, kernel_tol=opts.kernel_tol))])
        return ["tau", "index"], rows

    if command in ("modn", "inv"):
        window = int(sc.get("window", opts.mode_window))
        chi_grid = [float(t) for t in _need(sc, "chi_grid", where)]
        chi_values = [float(v) for v in _need(sc, "chi_values", where)]
        if chi_values[0] != 1.0:
            raise ConfigParseError(f"{where}: chi_values must start at 1 (near end)")
        cov = _need(sc, "cover", where)
        cover = CoverConfig(int(_need(cov, "sheets", where)), bool(cov.get("trivial", False)))
        conv = _build_conventions(sc.get("conventions", {}))
        twists = _sweep_values(sc, "twist", sc.get("twist", 0.25))
        rows = []
        for t in twists:
            base = lattice_cylinder(
                window, chi_grid, [t * v for v in chi_values], conventions=conv
            )
            lifted = lift_problem(base, cover)
            if command == "modn":
                res = modn_index(lifted, cover, kernel_tol=opts.kernel_tol)
                rows.append([_fmt(t), _fmt(aps_index(lifted, kernel_tol=opts.kernel_tol)),
                             _fmt(res), _fmt(cover.sheets)])
            else:
                r = inv_invariant(lifted, cover, lattice_operator(1.0, t, 1),
                                  kernel_tol=opts.kernel_tol)
                rows.append([_fmt(t), _fmt(r.index), _fmt(r.modn), _fmt(r.eta_total),
                             _fmt(r.eta_base), _fmt(r.inv)])
        headers = (
            ["twist", "index", "residue", "sheets"]
            if command == "modn"
            else ["twist", "index", "modn", "eta_total", "eta_base", "inv"]
        )
        return headers, rows

    if command == "seeley-zeta":
        sym = _build_symbol(_need(sc, "symbol", where), where)
        rep = parity_report(sym)
        value = rep.local_zeta_value if rep.local_zeta_value is not None else local_zeta(sym)
        return (
            ["order", "local_zeta", "parity_condition", "zeta_term_odd", "predicted_vanishing"],
            [[_fmt(sym.order), _fmt(value), _fmt(rep.parity_condition_holds),
              _fmt(bool(rep.zeta_term_is_odd)), _fmt(rep.predicted_vanishing)]],
        )

    if command == "decomposition":
        p = _need(sc, "path", where)
        path = LatticePath(
            grid=tuple(float(t) for t in _need(p, "grid", where)),
            offsets=tuple(tuple(float(v) for v in c) for c in _need(p, "offsets", where)),
            scale=float(p.get("scale", 1.0)),
        )
        dec = eta_decomposition(path)
        rows = [["eta", _fmt(t), _fmt(v)] for t, v in zip(dec.taus, dec.etas)]
        rows += [["jump", _fmt(t), _fmt(j)] for t, j in dec.jumps]
        rows.append(["sf", "", _fmt(dec.sf)])
        rows.append(["continuous_change", "", _fmt(dec.continuous_change)])
        rows.append(["frac_max_jump", "", _fmt(dec.frac_max_jump)])
        return ["record", "tau", "value"], rows

    if command == "suite":
        results = run_suite(str(_need(sc, "name", where)))
        rows = [
            [r.criterion, "pass" if r.passed else "fail", _fmt(r.worst_error), _fmt(r.tolerance)]
            for r in results
        ]
        return ["criterion", "status", "worst_error", "tolerance"], rows

    raise ConfigParseError(f"{where}: unknown command {command!r}")


# --------------------------------------------------------------------------
# entry points
# --------------------------------------------------------------------------

def _write_csv(headers, rows, out_path: str | None) -> None:
    def _emit(fh):
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(headers)
        writer.writerows(rows)

    if out_path is None or out_path == "-":
        _emit(sys.stdout)
    else:
        with open(out_path, "w", newline="", encoding="utf-8") as fh:
            _emit(fh)


def _cmd_run(args) -> int:
    try:
        raw = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: ConfigParseError: cannot read {args.config}: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = json.loads(raw)
    except json.JSONDecodeError as exc:
        print(f"error: ConfigParseError: invalid JSON: {exc}", file=sys.stderr)
        return 2
    scenarios = cfg.get("scenarios")
    if not isinstance(scenarios, dict):
        print("error: ConfigParseError: top-level key 'scenarios' missing", file=sys.stderr)
        return 2
    if args.scenario not in scenarios:
        print(
            f"error: ConfigParseError: scenario {args.scenario!r} not in "
            f"{sorted(scenarios)}",
            file=sys.stderr,
        )
        return 2
    try:
        headers, rows = execute_scenario(args.scenario, scenarios[args.scenario], args)
    except (ConfigParseError, UnknownSuite) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except EtaIndexError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    _write_csv(headers, rows, args.out)
    if args.figdir:
        from .figures import render_table

        Path(args.figdir).mkdir(parents=True, exist_ok=True)
        render_table(headers, rows, str(Path(args.figdir) / f"{args.scenario}.png"),
                     title=args.scenario)
    return 0


def _cmd_suite(args) -> int:
    try:
        results = run_suite(args.name)
    except UnknownSuite as exc:
        print(f"error: UnknownSuite: {exc}", file=sys.stderr)
        return 2
    except EtaIndexError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    for r in results:
        print(r.line())
    failed = sum(1 for r in results if not r.passed)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 0 if failed == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="etaindex",
        description="Spectral flow, eta/zeta invariants and boundary index defects "
        "for one-dimensional model operators.",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a scenario from a config file")
    run.add_argument("--config", required=True, help="JSON scenario config path")
    run.add_argument("--scenario", required=True, help="scenario name to execute")
    run.add_argument("--out", default=None, help="CSV output path (default stdout)")
    run.add_argument("--figdir", default=None,
                     help="also render a PNG figure of the table into this directory")
    run.add_argument("--mode-window", type=int, default=MODE_WINDOW,
                     help="default Fourier-mode window half-width")
    run.add_argument("--gap-tol", type=float, default=GAP_TOL,
                     help="spectral gap tolerance for flow weights")
    run.add_argument("--kernel-tol", type=float, default=KERNEL_TOL,
                     help="zero-eigenvalue membership tolerance")
    run.set_defaults(func=_cmd_run)

    suite = sub.add_parser("suite", help="run a named acceptance suite")
    suite.add_argument("name", help=f"suite name, one of {sorted(SUITES)}")
    suite.set_defaults(func=_cmd_suite)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
