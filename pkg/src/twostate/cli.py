"""Command-line front end.

Every command builds a :class:`RunRecord`; ``--format machine`` prints it as
one JSON document, ``--format table`` prints aligned tables. Exit codes:
0 success, 2 parse error, 3 orthogonal pre/post-selection, 4 invalid basis,
5 numerical-residue or self-check failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__, threebox
from .dirac import OVERLAP_TOL, OrthogonalityError
from .entropy import (
    as_log_base,
    conditional_entropy,
    conditional_entropy_selected,
    conditional_entropy_selected_closed,
    scan_min_entropy,
)
from .linalg import Ket, OrthonormalBasis, projector
from .pointer_sim import PointerModel, analytic_moments, postselected_pointer, simulate_weak_measurement
from .postselect import postselection_probability, two_state_density, weak_value, weak_value_trace
from .stateio import (
    InvalidBasisError,
    StateFileError,
    basis_document,
    load_basis,
    load_state,
    state_document,
    write_json,
)

log = logging.getLogger("twostate")

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_ORTHOGONAL = 3
EXIT_BASIS = 4
EXIT_NUMERIC = 5


@dataclass
class RunRecord:
    command: str
    parameters: dict[str, Any]
    results: dict[str, float]
    seed: int | None = None
    checks: dict[str, bool] = field(default_factory=dict)
    tool_version: str = __version__

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        doc = json.loads(text)
        return cls(
            command=doc["command"],
            parameters=dict(doc["parameters"]),
            results={k: float(v) for k, v in doc["results"].items()},
            seed=doc.get("seed"),
            checks={k: bool(v) for k, v in doc.get("checks", {}).items()},
            tool_version=doc["tool_version"],
        )

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def _fmt(x: float) -> str:
    return f"{x:.4g}"


def _fmt_complex(z: complex) -> str:
    sign = "+" if z.imag >= 0 else "-"
    return f"{z.real:.4g} {sign} {abs(z.imag):.4g}i"


def _table(headers: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)))
    return "\n".join(lines)


def _put_complex(results: dict, key: str, z: complex) -> None:
    results[f"{key}.re"] = z.real
    results[f"{key}.im"] = z.imag


# ---------------------------------------------------------------- commands


def cmd_three_box(log_base=3.0, overlap_tol: float = OVERLAP_TOL) -> tuple[RunRecord, str]:
    lb = as_log_base(log_base)
    psi = threebox.PSI
    posts = threebox.POSTSELECTION_BASIS.kets
    names = ("phi", "phi'", "phi''")
    results: dict[str, float] = {}
    checks: dict[str, bool] = {}

    tsd = two_state_density(psi, threebox.PHI, overlap_tol)
    wv_rows = []
    for k, label in enumerate(threebox.BOX_LABELS):
        proj = threebox.box_projector(k)
        w = weak_value(tsd, proj)
        w_trace = weak_value_trace(tsd, proj)
        _put_complex(results, f"weak_value.{label}", w)
        checks[f"weak_value.{label}"] = (
            abs(w - threebox.REFERENCE_WEAK_VALUES[k]) <= 1e-12 and abs(w - w_trace) <= 1e-12
        )
        wv_rows.append([label, _fmt_complex(w), _fmt(threebox.REFERENCE_WEAK_VALUES[k])])

    base3 = as_log_base(3)
    ps_rows = []
    total_base3 = 0.0
    for k, (name, phi) in enumerate(zip(names, posts)):
        prob = postselection_probability(psi, phi)
        overlap = abs(complex(np.vdot(phi.amplitudes, psi.amplitudes)))
        s_c = conditional_entropy_selected(psi, phi, lb, overlap_tol)
        s_c_closed = conditional_entropy_selected_closed(psi, phi, lb, overlap_tol)
        s_c3 = conditional_entropy_selected_closed(psi, phi, base3, overlap_tol)
        total_base3 += prob * s_c3
        results[f"overlap.{name}"] = overlap
        results[f"probability.{name}"] = prob
        results[f"S_c.{name}"] = s_c
        ref_prob = threebox.REFERENCE_PROBABILITIES[k]
        ref_inv = threebox.REFERENCE_INVERSE_OVERLAPS[k]
        checks[f"probability.{name}"] = round(prob, 2) == ref_prob
        checks[f"S_c.{name}.routes"] = abs(s_c - s_c_closed) <= 1e-9
        checks[f"S_c.{name}.reference"] = abs(s_c3 - (-math.log(ref_inv, 3))) <= 0.01
        ps_rows.append([name, _fmt(overlap), _fmt(prob), f"{ref_prob:.2f}", _fmt(s_c), f"{-math.log(ref_inv, 3):.2f}"])
    checks["S_c.phi.exact"] = abs(results["S_c.phi"] * lb.ln_base / math.log(3) + 1.0) <= 1e-12

    total = conditional_entropy(psi, threebox.POSTSELECTION_BASIS, lb)
    results["S_C"] = total
    results["S_C.base3"] = total_base3
    checks["S_C.reference"] = abs(total_base3 - threebox.REFERENCE_TOTAL_BASE3) <= 0.005
    checks["S_C.consistent"] = abs(total * lb.ln_base / math.log(3) - total_base3) <= 1e-12

    record = RunRecord(
        command="three-box",
        parameters={"log_base": str(lb), "overlap_tol": overlap_tol},
        results=results,
        checks=checks,
    )
    text = "\n".join([
        "Three-box weak values (pre psi, post phi)",
        _table(["box", "weak value", "reference"], wv_rows),
        "",
        f"Post-selection table (entropies in base {lb}; reference columns base 3, 2 dp)",
        _table(["post", "|<phi|psi>|", "Pr", "ref Pr", "S_c", "ref S_c"], ps_rows),
        "",
        f"S_C (base {lb}) = {_fmt(total)}    base 3 = {_fmt(total_base3)}    reference (2 dp) = {threebox.REFERENCE_TOTAL_BASE3:.2f}",
        f"self-check: {'PASS' if record.ok else 'FAIL'}",
    ])
    return record, text


def _projector_from_args(args, dim: int) -> tuple[np.ndarray, dict]:
    if args.projector_ket is not None:
        ket = load_state(args.projector_ket)
        return projector(ket), {"projector_ket": str(args.projector_ket)}
    if args.projector_basis is not None:
        basis, _ = load_basis(args.projector_basis)
    else:
        basis = OrthonormalBasis.computational(dim)
    if basis.dim != dim:
        raise InvalidBasisError(f"projector basis has dim {basis.dim}, states have dim {dim}")
    idx = args.projector_index
    if not 0 <= idx < dim:
        raise StateFileError(f"projector index {idx} out of range for dimension {dim}")
    params = {"projector_index": idx}
    if args.projector_basis is not None:
        params["projector_basis"] = [str(p) for p in args.projector_basis]
    return projector(basis[idx]), params


def cmd_weak_value(psi: Ket, phi: Ket, pi: np.ndarray, params: dict, overlap_tol: float = OVERLAP_TOL):
    tsd = two_state_density(psi, phi, overlap_tol)
    w = weak_value(tsd, pi)
    w_trace = weak_value_trace(tsd, pi)
    results: dict[str, float] = {}
    _put_complex(results, "weak_value", w)
    _put_complex(results, "overlap", tsd.overlap)
    record = RunRecord(
        command="weak-value",
        parameters={**params, "overlap_tol": overlap_tol},
        results=results,
        checks={"routes_agree": abs(w - w_trace) <= 1e-12 * max(1.0, abs(w))},
    )
    text = _table(["quantity", "value"], [
        ["<phi|psi>", _fmt_complex(tsd.overlap)],
        ["weak value", _fmt_complex(w)],
    ])
    return record, text


def cmd_entropy(psi: Ket, basis: OrthonormalBasis, labels, params: dict, log_base="e",
                overlap_tol: float = OVERLAP_TOL):
    lb = as_log_base(log_base)
    results: dict[str, float] = {}
    rows = []
    for k, phi in enumerate(basis):
        name = labels[k] if labels and labels[k] else f"phi{k}"
        prob = postselection_probability(psi, phi)
        results[f"probability.{name}"] = prob
        if math.sqrt(prob) > overlap_tol:
            s_c = conditional_entropy_selected_closed(psi, phi, lb, overlap_tol)
            results[f"S_c.{name}"] = s_c
            rows.append([name, _fmt(prob), _fmt(s_c)])
        else:
            rows.append([name, _fmt(prob), "undefined"])
    total = conditional_entropy(psi, basis, lb)
    results["S_C"] = total
    record = RunRecord(
        command="entropy",
        parameters={**params, "log_base": str(lb), "overlap_tol": overlap_tol},
        results=results,
    )
    text = "\n".join([
        _table(["post", "Pr", f"S_c (base {lb})"], rows),
        f"S_C = {_fmt(total)}",
    ])
    return record, text


def cmd_scan(dim: int, trials: int, seed: int, log_base="e", refine: bool = True):
    lb = as_log_base(log_base)
    report = scan_min_entropy(Ket.basis_state(dim, 0), trials, seed, lb, refine=refine)
    results = {
        "paper_bound": report.paper_bound,
        "derived_bound": report.derived_bound,
        "sampled_min": report.sampled_min,
        "min_found": report.min_found,
        "optimizer_iterations": float(report.optimizer_iterations),
    }
    record = RunRecord(
        command="scan",
        parameters={"dim": dim, "trials": trials, "log_base": str(lb), "refine": refine},
        results=results,
        seed=seed,
        checks={
            "min_above_derived_bound": report.min_found >= report.derived_bound - 1e-9,
            "min_nonpositive": report.min_found <= 0.0,
            "below_paper_bound": report.below_paper_bound,
        },
    )
    text = "\n".join([
        _table(["quantity", f"value (base {lb})"], [
            ["stated bound (1/d)log(1/sqrt d)", _fmt(report.paper_bound)],
            ["derived bound -(1/2)log d", _fmt(report.derived_bound)],
            ["best sampled S_C", _fmt(report.sampled_min)],
            ["min found", _fmt(report.min_found)],
        ]),
        f"below stated bound: {'yes' if report.below_paper_bound else 'no'}",
    ])
    return record, text


def cmd_simulate(psi: Ket, phi: Ket, pi: np.ndarray, params: dict, g: float, sigma: float,
                 samples: int, seed: int, overlap_tol: float = OVERLAP_TOL):
    model = PointerModel(sigma=sigma, g=g)
    if not model.is_weak:
        log.warning("g/sigma = %.3g exceeds the weak regime (0.1); expect finite-coupling bias", model.weak_ratio)
    res = simulate_weak_measurement(psi, phi, pi, model, samples, seed, overlap_tol)
    mean_q, mean_p, prob = analytic_moments(postselected_pointer(psi, phi, pi, model, overlap_tol))
    analytic_re = mean_q / g
    analytic_im = mean_p * 2 * sigma * sigma / g
    results = {
        "re_estimate": res.re_estimate,
        "im_estimate": res.im_estimate,
        "re_stderr": res.re_stderr,
        "im_stderr": res.im_stderr,
        "analytic_mean_q": mean_q,
        "analytic_mean_p": mean_p,
        "analytic_re": analytic_re,
        "analytic_im": analytic_im,
        "postselection_probability": prob,
    }
    _put_complex(results, "exact_weak_value", res.exact_weak_value)
    record = RunRecord(
        command="simulate",
        parameters={**params, "g": g, "sigma": sigma, "samples": samples, "overlap_tol": overlap_tol},
        results=results,
        seed=seed,
    )
    w = res.exact_weak_value
    text = _table(["quantity", "Monte Carlo", "stderr", "analytic (finite g)", "weak value"], [
        ["Re", _fmt(res.re_estimate), _fmt(res.re_stderr), _fmt(analytic_re), _fmt(w.real)],
        ["Im", _fmt(res.im_estimate), _fmt(res.im_stderr), _fmt(analytic_im), _fmt(w.imag)],
    ])
    return record, text


# ---------------------------------------------------------------- parsing


def _add_globals(parser: argparse.ArgumentParser, suppress: bool) -> None:
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--log-base", default=default,
                        help="logarithm base: a number > 1 or 'e' (default 3 for three-box, e otherwise)")
    parser.add_argument("--format", choices=["table", "machine"], default=default if suppress else "table")
    parser.add_argument("--seed", type=int, default=default if suppress else 0)
    parser.add_argument("--tolerance-overlap", type=float, default=default if suppress else OVERLAP_TOL,
                        help="minimum |<phi|psi>| treated as non-orthogonal")


def _add_projector(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--projector-index", type=int, help="project onto ket INDEX of --projector-basis")
    group.add_argument("--projector-ket", type=Path, help="state file whose projector is used")
    parser.add_argument("--projector-basis", type=Path, nargs="+",
                        help="basis file(s) for --projector-index (default: computational basis)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twostate", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    _add_globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("three-box", help="reproduce the three-box example and self-check it")
    _add_globals(p, suppress=True)
    p.add_argument("--export", type=Path, metavar="DIR",
                   help="also write psi/phi/post-selection basis files into DIR")

    p = sub.add_parser("weak-value", help="weak value of a projector")
    _add_globals(p, suppress=True)
    p.add_argument("--psi", type=Path, required=True)
    p.add_argument("--phi", type=Path, required=True)
    _add_projector(p)

    p = sub.add_parser("entropy", help="conditional entropies over a post-selection basis")
    _add_globals(p, suppress=True)
    p.add_argument("--psi", type=Path, required=True)
    p.add_argument("--basis", type=Path, nargs="+", required=True,
                   help="basis file, or one state file per basis ket")

    p = sub.add_parser("scan", help="numerically minimize S_C over bases")
    _add_globals(p, suppress=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--no-refine", dest="refine", action="store_false")

    p = sub.add_parser("simulate", help="Monte Carlo weak measurement with a Gaussian pointer")
    _add_globals(p, suppress=True)
    p.add_argument("--psi", type=Path, required=True)
    p.add_argument("--phi", type=Path, required=True)
    _add_projector(p)
    p.add_argument("--g", type=float, required=True, help="coupling strength")
    p.add_argument("--sigma", type=float, default=1.0, help="pointer position spread")
    p.add_argument("--samples", type=int, default=1_000_000)
    return parser


def _export_three_box(directory: Path) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    write_json(directory / "psi.json", state_document(threebox.PSI))
    write_json(directory / "phi.json", state_document(threebox.PHI))
    write_json(directory / "postselection_basis.json",
               basis_document(threebox.POSTSELECTION_BASIS, ["phi", "phi'", "phi''"]))
    write_json(directory / "boxes.json", basis_document(threebox.BOXES, list(threebox.BOX_LABELS)))


def _dispatch(args) -> tuple[RunRecord, str]:
    tol = args.tolerance_overlap
    if args.command == "three-box":
        if args.export is not None:
            _export_three_box(args.export)
        return cmd_three_box(3.0 if args.log_base is None else args.log_base, tol)
    log_base = "e" if args.log_base is None else args.log_base
    if args.command == "scan":
        if args.dim < 2 or args.trials < 1:
            raise StateFileError("scan needs --dim >= 2 and --trials >= 1")
        return cmd_scan(args.dim, args.trials, args.seed, log_base, args.refine)
    if args.command == "entropy":
        psi = load_state(args.psi)
        basis, labels = load_basis(args.basis)
        if basis.dim != psi.dim:
            raise InvalidBasisError(f"basis dim {basis.dim} vs psi dim {psi.dim}")
        params = {"psi": str(args.psi), "basis": [str(p) for p in args.basis]}
        return cmd_entropy(psi, basis, labels, params, log_base, tol)
    psi = load_state(args.psi)
    phi = load_state(args.phi)
    if psi.dim != phi.dim:
        raise StateFileError(f"psi has dim {psi.dim}, phi has dim {phi.dim}")
    pi, params = _projector_from_args(args, psi.dim)
    params = {"psi": str(args.psi), "phi": str(args.phi), **params}
    if args.command == "weak-value":
        return cmd_weak_value(psi, phi, pi, params, tol)
    if args.samples < 100:
        raise StateFileError("--samples must be >= 100")
    return cmd_simulate(psi, phi, pi, params, args.g, args.sigma, args.samples, args.seed, tol)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    log.handlers[:] = [handler]
    log.setLevel(logging.DEBUG if args.verbose else logging.WARNING)
    log.propagate = False
    try:
        if args.log_base is not None:
            as_log_base(args.log_base)
        record, text = _dispatch(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if isinstance(exc, OrthogonalityError):
            return EXIT_ORTHOGONAL
        if isinstance(exc, InvalidBasisError):
            return EXIT_BASIS
        return EXIT_PARSE
    except ArithmeticError as exc:  # ResidueError, vanishing pointer norm
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    print(record.to_json() if args.format == "machine" else text)
    if record.command == "three-box" and not record.ok:
        failed = [k for k, v in record.checks.items() if not v]
        print(f"three-box self-check failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
