"""Command-line front end: validate, certify, higgs.

Input states are single JSON documents::

    {
      "dimA": 2, "dimB": 2,
      "jA": [0.5, -0.5], "jB": [0.5, -0.5],
      "jTotal": 0.0,
      "matrix": [[{"re": 0.0, "im": 0.0}, ...], ...]
    }

Matrix entries may be ``{"re": x, "im": y}`` objects or plain numbers
(taken as real). Exit codes: 0 success, 1 usage or parse error, 2 domain
validation failure. Reports are deterministic: identical inputs produce
byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .chsh import ChshCertificate, certify_nonlocality, grid_verify
from .entanglement import (
    BlockWitness,
    CrossedEntry,
    EntanglementVerdict,
    certify,
    classify_sectors,
    reduced_purity,
)
from .higgs_zz import (
    Measurement,
    TablesReport,
    f12,
    f13,
    params_from_measured,
    reproduce_tables,
    rho_from_params,
    significance,
)
from .structure import (
    EPS_ZERO,
    AdditiveStructure,
    DensityMatrix,
    StateValidationError,
    TextureViolation,
    validate_additivity,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DOMAIN = 2


class DocumentError(ValueError):
    """The input file could not be parsed into a state document."""


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise DocumentError(message)


def _parse_entry(entry) -> complex:
    if isinstance(entry, dict):
        _require(set(entry) <= {"re", "im"}, f"unexpected keys in matrix entry: {sorted(entry)}")
        re = entry.get("re", 0.0)
        im = entry.get("im", 0.0)
        _require(
            isinstance(re, (int, float)) and isinstance(im, (int, float)),
            "matrix entry re/im must be numbers",
        )
        return complex(re, im)
    if isinstance(entry, (int, float)):
        return complex(entry)
    raise DocumentError(f"matrix entries must be numbers or re/im objects, got {type(entry).__name__}")


def load_document(path: str) -> tuple[AdditiveStructure, DensityMatrix]:
    """Parse and validate a state document.

    Raises ``DocumentError`` for parse or shape problems and
    ``StateValidationError`` when the matrix fails the density-matrix
    invariants.
    """
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON in {path}: {exc}") from exc

    _require(isinstance(data, dict), "document root must be an object")
    for key in ("dimA", "dimB", "jA", "jB", "jTotal", "matrix"):
        _require(key in data, f"missing key {key!r}")
    d_a, d_b = data["dimA"], data["dimB"]
    _require(isinstance(d_a, int) and d_a >= 1, "dimA must be a positive integer")
    _require(isinstance(d_b, int) and d_b >= 1, "dimB must be a positive integer")
    j_a, j_b = data["jA"], data["jB"]
    _require(isinstance(j_a, list) and len(j_a) == d_a, "jA must be a list of length dimA")
    _require(isinstance(j_b, list) and len(j_b) == d_b, "jB must be a list of length dimB")
    labels = [*j_a, *j_b, data["jTotal"]]
    _require(
        all(isinstance(v, (int, float)) for v in labels), "eigenvalue labels must be numbers"
    )
    _require(np.isfinite(labels).all(), "eigenvalue labels must be finite")

    dim = d_a * d_b
    rows = data["matrix"]
    _require(isinstance(rows, list) and len(rows) == dim, f"matrix must have {dim} rows")
    mat = np.zeros((dim, dim), dtype=complex)
    for i, row in enumerate(rows):
        _require(isinstance(row, list) and len(row) == dim, f"matrix row {i} must have {dim} entries")
        for j, entry in enumerate(row):
            mat[i, j] = _parse_entry(entry)
    _require(bool(np.isfinite(mat).all()), "matrix entries must be finite")

    structure = AdditiveStructure(tuple(j_a), tuple(j_b), float(data["jTotal"]))
    return structure, DensityMatrix(mat)


# --- report rendering ---


def _complex_dict(z: complex) -> dict:
    return {"im": float(z.imag), "re": float(z.real)}


def _violation_dict(v: TextureViolation) -> dict:
    return {
        "aliceCol": v.alice_col,
        "aliceRow": v.alice_row,
        "bobCol": v.bob_col,
        "bobRow": v.bob_row,
        "col": v.col,
        "colLabelSum": v.col_label_sum,
        "magnitude": abs(v.value),
        "row": v.row,
        "rowLabelSum": v.row_label_sum,
        "value": _complex_dict(v.value),
    }


def _witness_dict(witness) -> dict | None:
    if witness is None:
        return None
    if isinstance(witness, CrossedEntry):
        return {
            "alice": list(witness.alice),
            "bob": list(witness.bob),
            "col": witness.col,
            "kind": "crossed_entry",
            "row": witness.row,
            "value": _complex_dict(witness.value),
        }
    if isinstance(witness, BlockWitness):
        return {
            "degM": witness.sector.deg_m,
            "degQ": witness.sector.deg_q,
            "kind": "ppt_block",
            "mValue": witness.sector.m_value,
            "minEigenvalue": witness.min_eigenvalue,
            "qValue": witness.sector.q_value,
        }
    raise TypeError(f"unknown witness type {type(witness).__name__}")


def _certificate_dict(cert: ChshCertificate, grid: dict | None) -> dict:
    out = {
        "aliceOrder": list(cert.reorder.alice_order),
        "anchor": {
            "alice": [cert.anchor.m0, cert.anchor.n0],
            "bob": [cert.anchor.p0, cert.anchor.q0],
            "value": _complex_dict(cert.anchor.value),
        },
        "bobOrder": list(cert.reorder.bob_order),
        "fMax": cert.f_max,
        "phiOpt": cert.phi_opt,
        "thetaOpt": cert.theta_opt,
    }
    if grid is not None:
        out["gridCheck"] = grid
    return out


def _emit(payload: dict, args, text_lines: list[str]) -> None:
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _violation_lines(violations: list[TextureViolation]) -> list[str]:
    lines = [f"texture: INVALID ({len(violations)} violating entries)"]
    for v in violations:
        lines.append(
            f"  entry ({v.row},{v.col}) = rho[(m={v.alice_row},p={v.bob_row}),"
            f"(n={v.alice_col},q={v.bob_col})] |value| = {abs(v.value):.12g}"
            f" label sums ({v.row_label_sum:.12g}, {v.col_label_sum:.12g})"
        )
    return lines


def cmd_validate(args) -> int:
    structure, state = load_document(args.path)
    violations = validate_additivity(state, structure, args.zero_tol)
    payload = {
        "textureValid": not violations,
        "textureViolations": [_violation_dict(v) for v in violations],
        "toolVersion": __version__,
    }
    lines = ["texture: VALID"] if not violations else _violation_lines(violations)
    _emit(payload, args, lines)
    return EXIT_OK if not violations else EXIT_DOMAIN


def _parse_grid(spec: str) -> tuple[int, int]:
    try:
        n_theta, n_phi = spec.lower().split("x")
        return int(n_theta), int(n_phi)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"--grid expects <nTheta>x<nPhi>, got {spec!r}"
        ) from exc


def cmd_certify(args) -> int:
    structure, state = load_document(args.path)
    violations = validate_additivity(state, structure, args.zero_tol)
    if violations:
        payload = {
            "textureViolations": [_violation_dict(v) for v in violations],
            "toolVersion": __version__,
        }
        _emit(payload, args, _violation_lines(violations))
        return EXIT_DOMAIN

    verdict: EntanglementVerdict = certify(state, structure, tol=args.zero_tol)
    purity_a = reduced_purity(state, structure, "A")
    purity_b = reduced_purity(state, structure, "B")
    classes = classify_sectors(structure)
    cert = certify_nonlocality(state, structure, tol=args.zero_tol)

    grid_info = None
    if cert is not None and args.grid is not None:
        n_theta, n_phi = args.grid
        f_grid = grid_verify(state, cert.anchor, structure, n_theta, n_phi)
        grid_info = {
            "fGrid": f_grid,
            "gap": cert.f_max - f_grid,
            "nPhi": n_phi,
            "nTheta": n_theta,
        }

    payload = {
        "chshCertificate": None if cert is None else _certificate_dict(cert, grid_info),
        "entanglementVerdict": {
            "status": verdict.status.value,
            "witness": _witness_dict(verdict.witness),
        },
        "minPtEigenvalue": verdict.min_pt_eigenvalue,
        "reducedPurities": {"A": purity_a, "B": purity_b},
        "sectorClasses": [
            {
                "degM": c.sector.deg_m,
                "degQ": c.sector.deg_q,
                "kind": c.kind.value,
                "mValue": c.sector.m_value,
                "qValue": c.sector.q_value,
            }
            for c in classes
        ],
        "textureViolations": [],
        "toolVersion": __version__,
    }

    lines = ["texture: VALID", f"verdict: {verdict.status.value}"]
    if isinstance(verdict.witness, CrossedEntry):
        w = verdict.witness
        lines.append(
            f"witness: crossed entry rho[({w.alice[0]},{w.bob[0]}),({w.alice[1]},{w.bob[1]})]"
            f" = {w.value.real:.12g}{w.value.imag:+.12g}j"
        )
    elif isinstance(verdict.witness, BlockWitness):
        w = verdict.witness
        lines.append(
            f"witness: PPT block (M={w.sector.m_value:.12g}, Q={w.sector.q_value:.12g})"
            f" min eigenvalue {w.min_eigenvalue:.12g}"
        )
    lines.append(f"min PT eigenvalue: {verdict.min_pt_eigenvalue:.12g}")
    lines.append(f"reduced purity: A = {purity_a:.12g}  B = {purity_b:.12g}")
    lines.append(
        "shell sectors: "
        + ", ".join(
            f"(M={c.sector.m_value:.12g},Q={c.sector.q_value:.12g}) "
            f"{c.sector.deg_m}x{c.sector.deg_q} {c.kind.value}"
            for c in classes
        )
    )
    if cert is None:
        lines.append("CHSH: no anchor entry; no violation certified")
    else:
        lines.append(
            f"CHSH: fMax = {cert.f_max:.12f}  theta = {cert.theta_opt:.12g}"
            f"  phi = {cert.phi_opt:.12g}"
        )
        a = cert.anchor
        lines.append(
            f"CHSH anchor: rho[(m={a.m0},p={a.p0}),(n={a.n0},q={a.q0})]"
            f"  |value| = {abs(a.value):.12g}"
        )
        if grid_info is not None:
            lines.append(
                f"grid check ({grid_info['nTheta']}x{grid_info['nPhi']}): "
                f"fGrid = {grid_info['fGrid']:.12f}  gap = {grid_info['gap']:.3e}"
            )
    _emit(payload, args, lines)
    return EXIT_OK


def _tables_payload(report: TablesReport) -> dict:
    return {
        "allPass": report.all_pass,
        "columns": [
            {
                "a12": {"central": col.a12.central, "sigma": col.a12.sigma},
                "a13": {"central": col.a13.central, "sigma": col.a13.sigma},
                "checks": [
                    {
                        "computed": check.computed,
                        "interval": list(check.interval),
                        "name": check.name,
                        "passed": check.passed,
                        "printed": check.printed,
                    }
                    for check in col.checks
                ],
                "cutGeV": col.cut_gev,
                "nEvents": col.n_events,
                "table": col.table_label,
            }
            for col in report.columns
        ],
        "toolVersion": __version__,
    }


def cmd_higgs(args) -> int:
    if args.tables:
        report = reproduce_tables()
        lines = []
        for col in report.columns:
            lines.append(
                f"[{col.table_label}, cut {col.cut_gev} GeV] N={col.n_events}"
                f"  a12 = {col.a12.central:+.2f}+/-{col.a12.sigma:.2f}"
                f"  a13 = {col.a13.central:+.2f}+/-{col.a13.sigma:.2f}"
            )
            for check in col.checks:
                lines.append(
                    f"  {check.name:<6} = {check.computed:.12g}"
                    f"  printed {check.printed:g}"
                    f"  {'PASS' if check.passed else 'FAIL'}"
                )
        n_checks = len(report.checks())
        n_pass = sum(1 for c in report.checks() if c.passed)
        lines.append(f"ALL CHECKS: {'PASS' if report.all_pass else 'FAIL'} ({n_pass}/{n_checks})")
        _emit(_tables_payload(report), args, lines)
        return EXIT_OK if report.all_pass else EXIT_DOMAIN

    try:
        params = params_from_measured(args.a12, args.a13)
        state, structure = rho_from_params(params)
    except (ValueError, StateValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    # texture sanity: the constructed matrix is exact, so this cannot fail
    assert not validate_additivity(state, structure, EPS_ZERO)

    payload: dict = {
        "f12": f12(params),
        "f13": f13(params),
        "toolVersion": __version__,
    }
    lines = [
        f"F12 = {payload['f12']:.12f}",
        f"F13 = {payload['f13']:.12f}",
    ]
    if args.sigma12 is not None:
        sig = significance(Measurement(args.a12, args.sigma12))
        payload["significance12"] = sig
        lines.append(f"significance(a12) = {sig:.12g}")
    if args.sigma13 is not None:
        sig = significance(Measurement(args.a13, args.sigma13))
        payload["significance13"] = sig
        lines.append(f"significance(a13) = {sig:.12g}")
    _emit(payload, args, lines)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="addobs-certify",
        description=(
            "Certify entanglement and CHSH nonlocality for bipartite density "
            "matrices constrained by an additive observable with a definite value."
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--format", choices=("text", "json"), default="text", help="report format"
    )

    p_validate = sub.add_parser(
        "validate", parents=[common], help="check the additive-observable texture"
    )
    p_validate.add_argument("path", help="state document (JSON)")
    p_validate.add_argument(
        "--zero-tol", type=float, default=EPS_ZERO,
        help="threshold below which entries count as vanishing",
    )
    p_validate.set_defaults(func=cmd_validate)

    p_certify = sub.add_parser(
        "certify", parents=[common], help="entanglement verdict and CHSH certificate"
    )
    p_certify.add_argument("path", help="state document (JSON)")
    p_certify.add_argument(
        "--zero-tol", type=float, default=EPS_ZERO,
        help="threshold below which entries count as vanishing",
    )
    p_certify.add_argument(
        "--grid", type=_parse_grid, default=None, metavar="NTHETAxNPHI",
        help="cross-check the closed-form maximum on an angle grid",
    )
    p_certify.set_defaults(func=cmd_certify)

    p_higgs = sub.add_parser(
        "higgs", parents=[common], help="H->ZZ CHSH values and table reproduction"
    )
    p_higgs.add_argument("--a12", type=float, help="measured a12 central value")
    p_higgs.add_argument("--a13", type=float, help="measured a13 central value")
    p_higgs.add_argument("--sigma12", type=float, help="uncertainty on a12")
    p_higgs.add_argument("--sigma13", type=float, help="uncertainty on a13")
    p_higgs.add_argument(
        "--tables", action="store_true",
        help="reproduce the published pseudoexperiment tables",
    )
    p_higgs.set_defaults(func=cmd_higgs)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    if args.command == "higgs" and not args.tables and (args.a12 is None or args.a13 is None):
        print("error: higgs needs --tables or both --a12 and --a13", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except DocumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (StateValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
