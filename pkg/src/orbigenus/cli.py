"""Batch command-line interface with stable JSON output.

Exit status: 0 all checks passed / command succeeded, 1 a check failed or the
computation could not be completed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .exactmath import mat_det
from .genus import default_y_cap, ell_genus_series
from .oracle import free_state_series, zero_level_group_average
from .potential import (
    InvalidPotentialError,
    Potential,
    PotentialSyntaxError,
    compute_charges,
    decompose_atoms,
    parse_potential,
    transpose_potential,
)
from .qseries import Windows
from .symmetry import (
    AdmissibilityError,
    PhaseVector,
    SymmetryGroup,
    admissible_subgroups,
    aut_group,
    dual_group,
    grading_element,
    grading_subgroup,
    sl_subgroup,
)
from .verify import (
    check_holomorphy,
    check_jacobi_transformations,
    check_mirror,
    check_spectral_flow,
    check_star_substitution,
)

CHECK_NAMES = ("holo", "jacobi", "mirror", "star", "flow", "oracle")


class InputError(ValueError):
    pass


def _load_potential(source: str) -> Potential:
    if os.path.exists(source):
        with open(source, "r", encoding="utf-8") as handle:
            source = handle.read()
    return parse_potential(source)


def _load_group(source: str | None, potential: Potential) -> SymmetryGroup:
    if source is None or source.strip() in ("J", "j", ""):
        return grading_subgroup(potential)
    if source.strip() in ("SL", "sl"):
        return sl_subgroup(potential)
    generators = [part for part in source.split(";") if part.strip()]
    try:
        group = SymmetryGroup.from_generator_strings(generators, potential.dimension)
    except (ValueError, ZeroDivisionError) as err:
        raise InputError(f"bad group generators: {err}") from err
    return group


def _group_json(group: SymmetryGroup) -> dict:
    return {
        "order": group.order,
        "structure": list(group.structure),
        "generators": group.generator_strings(),
    }


def _info_payload(potential: Potential) -> dict:
    atoms = decompose_atoms(potential)
    charges = compute_charges(potential)
    aut = aut_group(potential)
    sl = sl_subgroup(potential)
    payload = {
        "d": potential.dimension,
        "potential": potential.text,
        "matrix": [list(row) for row in potential.matrix],
        "atoms": [
            {"kind": a.kind,
             "variables": [potential.names[v] for v in a.variables],
             "exponents": list(a.exponents)}
            for a in atoms.atoms
        ],
        "charges": [str(q) for q in charges.q],
        "k": charges.cy_degree,
        "cbar": str(charges.central_charge),
        "calabi_yau": charges.cy_degree is not None,
        "det": mat_det(potential.matrix),
        "aut_order": aut.order,
        "aut_structure": list(aut.structure),
        "J": grading_element(potential).as_string(),
        "sl_order": sl.order,
        "quadratic_fermat_variables": [
            potential.names[v] for v in atoms.quadratic_fermat_variables()
        ],
    }
    return payload


def _emit(payload, out_path: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text)
    sys.stdout.write(text)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as err:
        raise InputError(f"bad rational {text!r}: {err}") from err


def _cmd_info(args) -> int:
    potential = _load_potential(args.potential)
    _emit(_info_payload(potential), args.out)
    return 0


def _cmd_groups(args) -> int:
    potential = _load_potential(args.potential)
    subgroups = admissible_subgroups(potential)
    _emit({"count": len(subgroups), "groups": [_group_json(g) for g in subgroups]}, args.out)
    return 0


def _cmd_dual(args) -> int:
    potential = _load_potential(args.potential)
    group = _load_group(args.group, potential)
    if not group.is_subgroup_of(aut_group(potential)):
        raise InputError("group generators do not preserve the potential")
    dual = dual_group(potential, group)
    _emit(
        {
            "group": _group_json(group),
            "dual_potential": transpose_potential(potential).text,
            "dual_group": _group_json(dual),
        },
        args.out,
    )
    return 0


def _cmd_genus(args) -> int:
    potential = _load_potential(args.potential)
    group = _load_group(args.group, potential)
    qmax = _fraction(args.qmax) if args.qmax else None
    ycap = _fraction(args.ywin) if args.ywin else None
    series = ell_genus_series(potential, group, qmax=qmax, ycap=ycap)
    _emit(series.to_json_dict(), args.out)
    return 0


def _oracle_verdicts(potential: Potential, group: SymmetryGroup, qmax: Fraction) -> list[dict]:
    charges = compute_charges(potential)
    # a modest window keeps the brute-force enumeration cheap; equality on a
    # window is what the oracle certifies
    ymax = min(default_y_cap(potential, qmax), Fraction(3))
    from .genus import cone_supertrace_series, sector_supertrace_series

    windows = Windows.make(qmax, -ymax, ymax)
    free = free_state_series(charges, int(qmax), (-ymax, ymax))
    cone = cone_supertrace_series(charges, windows)
    free_ok = free.rational_terms() == cone.rational_terms()
    zero = PhaseVector.canonical([0] * potential.dimension)
    sector = sector_supertrace_series(potential, group, zero, Windows.make(0, 0, ymax))
    lattice = zero_level_group_average(potential, group, (0, ymax))
    zero_ok = sector.rational_terms() == lattice.rational_terms()
    return [
        {"check": "oracle-free-states", "status": "pass" if free_ok else "fail",
         "max_residual": "exact", "details": []},
        {"check": "oracle-zero-level", "status": "pass" if zero_ok else "fail",
         "max_residual": "exact", "details": []},
    ]


def _cmd_check(args) -> int:
    potential = _load_potential(args.potential)
    group = _load_group(args.group, potential)
    selected = [name.strip() for name in (args.set or ",".join(CHECK_NAMES)).split(",") if name.strip()]
    unknown = [name for name in selected if name not in CHECK_NAMES]
    if unknown:
        raise InputError(f"unknown check(s): {', '.join(unknown)}; valid: {', '.join(CHECK_NAMES)}")
    qmax = _fraction(args.qmax) if args.qmax else Fraction(1)
    ycap = _fraction(args.ywin) if args.ywin else None
    tol = args.tol
    verdicts: list[dict] = []
    for name in selected:
        if name == "holo":
            verdicts.append(check_holomorphy(potential, group).to_json_dict())
        elif name == "jacobi":
            verdicts.append(
                check_jacobi_transformations(
                    potential, group, samples=args.samples, tol=tol, seed=args.seed
                ).to_json_dict()
            )
        elif name == "mirror":
            verdicts.append(
                check_mirror(potential, group, qmax=qmax, ycap=ycap).to_json_dict()
            )
        elif name == "star":
            verdicts.append(
                check_star_substitution(
                    potential, group, samples=args.samples, tol=tol, seed=args.seed
                ).to_json_dict()
            )
        elif name == "flow":
            verdicts.append(
                check_spectral_flow(
                    potential, group, samples=args.samples, tol=tol, seed=args.seed
                ).to_json_dict()
            )
        elif name == "oracle":
            verdicts.extend(_oracle_verdicts(potential, group, qmax))
    all_pass = all(v["status"] == "pass" for v in verdicts)
    _emit({"checks": verdicts, "all_pass": all_pass}, args.out)
    return 0 if all_pass else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orbigenus",
        description="Orbifold elliptic genus of invertible polynomial potentials",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--potential", required=True,
                        help="potential file, inline text, or inline JSON")
    common.add_argument("--group", default=None,
                        help='generators "a/b,...;c/d,..." or the aliases J / SL (default J)')
    common.add_argument("--qmax", default=None, help="q-order truncation (rational)")
    common.add_argument("--ywin", default=None, help="y-window half width (rational)")
    common.add_argument("--tol", type=float, default=None, help="numeric tolerance")
    common.add_argument("--samples", type=int, default=5, help="sample count for numeric checks")
    common.add_argument("--seed", type=int, default=0, help="sample RNG seed")
    common.add_argument("--out", default=None, help="also write the JSON to this path")

    sub.add_parser("info", parents=[common], help="potential data and symmetry overview")
    sub.add_parser("groups", parents=[common], help="enumerate admissible groups")
    sub.add_parser("dual", parents=[common], help="dual potential and dual group")
    sub.add_parser("genus", parents=[common], help="exact genus expansion as JSON")
    check = sub.add_parser("check", parents=[common], help="run verification checks")
    check.add_argument("--set", default=None,
                       help=f"comma-separated subset of {{{','.join(CHECK_NAMES)}}}")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "info": _cmd_info,
        "groups": _cmd_groups,
        "dual": _cmd_dual,
        "genus": _cmd_genus,
        "check": _cmd_check,
    }
    try:
        return handlers[args.command](args)
    except (PotentialSyntaxError, InvalidPotentialError, AdmissibilityError, InputError) as err:
        sys.stderr.write(f"error: {err}\n")
        return 2
    except (ArithmeticError, ValueError) as err:
        sys.stderr.write(f"computation failed: {err}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
