"""Scenario runner: builds the model states, compares brute-force
entropies against their closed forms, and writes CSV or JSON tables.

Every table carries both the brute-force and the analytic value
whenever both exist.  CSV files use a header row, 17-significant-digit
floats, and LF line endings; the JSON format mirrors the same field
names.  Randomly drawn amplitude tables are recorded next to the
output file in <out>.meta.json so a run can be replayed.

Exit codes: 0 success, 1 failed verification, 2 invalid configuration,
3 size-guard breach, 4 numerical invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import analytic, states, verification
from .dynamics import check_proper_basis, evolve_many, load_hamiltonian
from .entanglement import mode_entanglement
from .errors import (
    NormalizationError,
    NumericalInvariantError,
    SizeGuardError,
    TruncationError,
)
from .fock_core import basis_state, number_expectation, registry_create, electron
from .states import (
    ExcitonChannel,
    PairAmplitudeTable,
    TableKind,
    load_amplitude_table,
    table_payload,
)

QH_BRUTE_LIMIT = 12


# ---------------------------------------------------------------------------
# table output


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value + 0.0, ".17g")
    return str(value)


def render_table(rows: list[dict], columns: list[str], fmt: str) -> str:
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format_cell(row.get(c)) for c in columns])
        return buffer.getvalue()
    if fmt == "json":
        def plain(value):
            return value + 0.0 if isinstance(value, float) else value

        mirrored = [{c: plain(row.get(c)) for c in columns} for row in rows]
        return json.dumps(mirrored, indent=2) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def emit_table(rows: list[dict], columns: list[str], fmt: str, out: str | None) -> None:
    text = render_table(rows, columns, fmt)
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, newline="")


def _write_meta(out: str | None, meta: dict | None) -> None:
    if out is None or meta is None:
        return
    Path(str(out) + ".meta.json").write_text(json.dumps(meta, indent=2) + "\n")


def _summary(max_err: float | None, tol: float) -> None:
    if max_err is None:
        print("max |error| = n/a")
        return
    status = "ok" if max_err <= tol else "tol exceeded"
    print(f"max |error| = {max_err:.6e} ({status} at tol {tol:g})")


# ---------------------------------------------------------------------------
# scenario: fermi


def run_fermi(args) -> int:
    num_modes = args.modes
    filled = args.filled if args.filled is not None else num_modes // 2
    if not 0 <= filled <= num_modes:
        raise ValueError(f"cannot fill {filled} of {num_modes} modes")
    registry = registry_create([electron(k) for k in range(num_modes)])
    sea = states.fermi_sea(registry, range(filled))
    cases = [("sea", sea)]
    if 0 < filled < num_modes:
        from .fock_core import apply_annihilation, apply_creation

        excited = apply_creation(apply_annihilation(sea, filled - 1), filled)
        cases.append(("excited", excited.normalize()))
    rows = []
    worst = 0.0
    for name, state in cases:
        for mode in range(num_modes):
            s = mode_entanglement(state, (mode,))
            rows.append(
                {
                    "state": name,
                    "mode": mode,
                    "occupation": number_expectation(state, mode),
                    "S_bruteforce": s,
                    "S_analytic": 0.0,
                    "abs_err": abs(s),
                }
            )
            worst = max(worst, abs(s))
    columns = ["state", "mode", "occupation", "S_bruteforce", "S_analytic", "abs_err"]
    emit_table(rows, columns, args.format, args.out)
    _summary(worst, args.tol)
    return 0


# ---------------------------------------------------------------------------
# scenario: exciton


def _momentum_cell(k) -> str:
    return str(k[0]) if len(k) == 1 else ";".join(str(x) for x in k)


def run_exciton(args) -> int:
    e_momenta = [(k,) for k in range(args.electrons)]
    h_momenta = [(k,) for k in range(args.holes)]
    meta = None
    if args.table is not None:
        table = load_amplitude_table(args.table)
        if table.kind is not TableKind.EXCITON_A:
            raise ValueError(f"need an exciton_A table, got {table.kind.value}")
        keys = set(table.values)
        e_momenta = sorted({k for k, _ in keys})
        h_momenta = sorted({kp for _, kp in keys})
    else:
        rng = np.random.default_rng(args.seed)
        table = states.random_exciton_table(e_momenta, h_momenta, rng)
        meta = {"seed": args.seed, "table": table_payload(table)}

    channel = ExcitonChannel(args.channel)
    spinful = channel is not ExcitonChannel.SPINLESS
    registry = states.exciton_registry(e_momenta, h_momenta, spinful=spinful)
    if spinful:
        state = states.exciton_spinful(registry, table, channel)
    else:
        state = states.exciton_spinless(registry, table)
    marginals = analytic.exciton_marginals(table.values)
    side = len(e_momenta)
    mixed = channel in (ExcitonChannel.TRIPLET_ZERO, ExcitonChannel.SINGLET)

    def electron_mode(i: int) -> int:
        if not spinful:
            return i
        return 2 * i if channel is not ExcitonChannel.TRIPLET_DOWN else 2 * i + 1

    def hole_mode(j: int) -> int:
        if not spinful:
            return side + j
        base = 2 * side + 2 * j
        if channel is ExcitonChannel.TRIPLET_DOWN or mixed:
            return base + 1
        return base

    rows = []
    worst = 0.0
    for i, k in enumerate(e_momenta):
        for j, kp in enumerate(h_momenta):
            se = mode_entanglement(state, (electron_mode(i),))
            sh = mode_entanglement(state, (hole_mode(j),))
            sp = mode_entanglement(state, (electron_mode(i), hole_mode(j)))
            if mixed:
                ae = marginals.spinful_electron_entropy(k)
                ah = marginals.spinful_hole_entropy(kp)
                ap = marginals.spinful_opposite_entropy(k, kp)
            else:
                ae = marginals.electron_entropy(k)
                ah = marginals.hole_entropy(kp)
                ap = marginals.joint_entropy(k, kp)
            err = max(abs(se - ae), abs(sh - ah), abs(sp - ap))
            worst = max(worst, err)
            rows.append(
                {
                    "electron_k": _momentum_cell(k),
                    "hole_k": _momentum_cell(kp),
                    "S_electron_bruteforce": se,
                    "S_electron_analytic": ae,
                    "S_hole_bruteforce": sh,
                    "S_hole_analytic": ah,
                    "S_pair_bruteforce": sp,
                    "S_pair_analytic": ap,
                    "abs_err": err,
                }
            )
    columns = [
        "electron_k",
        "hole_k",
        "S_electron_bruteforce",
        "S_electron_analytic",
        "S_hole_bruteforce",
        "S_hole_analytic",
        "S_pair_bruteforce",
        "S_pair_analytic",
        "abs_err",
    ]
    emit_table(rows, columns, args.format, args.out)
    _write_meta(args.out, meta)
    _summary(worst, args.tol)
    return 0


# ---------------------------------------------------------------------------
# scenario: qh


def run_qh(args) -> int:
    rows = []
    worst = 0.0
    for text in args.filling:
        filling = Fraction(text)
        if filling < 0:
            raise ValueError(f"filling must be nonnegative, got {filling}")
        fractional = filling - math.floor(filling)
        s_analytic = analytic.qh_entropy(filling)
        s_brute = None
        err = None
        if fractional.denominator <= QH_BRUTE_LIMIT:
            m = fractional.denominator
            registry = states.uniform_registry(m)
            state = states.uniform_filling_state(registry, m, fractional.numerator)
            s_brute = mode_entanglement(state, (0,))
            err = abs(s_brute - s_analytic)
            worst = max(worst, err)
        rows.append(
            {
                "filling": str(filling),
                "fractional_part": str(fractional),
                "S_analytic": s_analytic,
                "S_bruteforce": s_brute,
                "abs_err": err,
            }
        )
    columns = ["filling", "fractional_part", "S_analytic", "S_bruteforce", "abs_err"]
    emit_table(rows, columns, args.format, args.out)
    _summary(worst if any(r["abs_err"] is not None for r in rows) else None, args.tol)
    return 0


# ---------------------------------------------------------------------------
# scenario: bcs


def _load_or_random_bcs(args, momenta) -> tuple[PairAmplitudeTable, dict | None]:
    if args.g != "random":
        table = load_amplitude_table(args.g)
        if table.kind is not TableKind.BCS_G:
            raise ValueError(f"need a bcs_g table, got {table.kind.value}")
        return table, None
    rng = np.random.default_rng(args.seed)
    table = states.random_bcs_table(momenta, rng)
    return table, {"seed": args.seed, "table": table_payload(table)}


def run_bcs(args) -> int:
    momenta = [(k,) for k in range(1, args.modes + 1)]
    table, meta = _load_or_random_bcs(args, momenta)
    momenta = table.pair_indices()
    registry = states.bcs_registry(momenta)
    rows = []
    worst = 0.0
    if args.unprojected:
        state = states.bcs_unprojected(registry, table)
        for i, k in enumerate(momenta):
            g = table.values[k]
            x_analytic = abs(g) ** 2 / (1.0 + abs(g) ** 2)
            s_analytic = analytic.bcs_pair_entropy(g)
            x_brute = number_expectation(state, 2 * i)
            s_brute = mode_entanglement(state, (2 * i,))
            err = max(abs(x_brute - x_analytic), abs(s_brute - s_analytic))
            worst = max(worst, err)
            rows.append(
                {
                    "pair_index": _momentum_cell(k),
                    "g_abs": abs(g),
                    "x_analytic": x_analytic,
                    "x_bruteforce": x_brute,
                    "S_analytic": s_analytic,
                    "S_bruteforce": s_brute,
                    "abs_err": err,
                }
            )
    else:
        total = args.n
        unpaired = (args.unpaired,) if args.unpaired is not None else None
        state = states.bcs_projected(registry, table, total, unpaired=unpaired)
        paired_values = dict(table.values)
        paired_total = total
        if unpaired is not None:
            paired_values.pop(unpaired, None)
            paired_total = total - 1
        for i, k in enumerate(momenta):
            g = table.values[k]
            if unpaired is not None and k == unpaired:
                x_analytic = 1.0
                s_analytic = 0.0
            else:
                x_analytic = analytic.bcs_projected_x(paired_values, paired_total, k)
                s_analytic = analytic.binary_entropy(x_analytic)
            x_brute = number_expectation(state, 2 * i)
            s_brute = mode_entanglement(state, (2 * i,))
            err = max(abs(x_brute - x_analytic), abs(s_brute - s_analytic))
            worst = max(worst, err)
            rows.append(
                {
                    "pair_index": _momentum_cell(k),
                    "g_abs": abs(g),
                    "x_analytic": x_analytic,
                    "x_bruteforce": x_brute,
                    "S_analytic": s_analytic,
                    "S_bruteforce": s_brute,
                    "abs_err": err,
                }
            )
    columns = [
        "pair_index",
        "g_abs",
        "x_analytic",
        "x_bruteforce",
        "S_analytic",
        "S_bruteforce",
        "abs_err",
    ]
    emit_table(rows, columns, args.format, args.out)
    _write_meta(args.out, meta)
    _summary(worst, args.tol)
    return 0


# ---------------------------------------------------------------------------
# scenario: bogoliubov


def run_bogoliubov(args) -> int:
    qs = [(q,) for q in range(1, args.pairs + 1)]
    meta = None
    if args.unprojected:
        if args.c != "random":
            table = load_amplitude_table(args.c)
            if table.kind is not TableKind.BOGOLIUBOV_UV:
                raise ValueError(f"need a bogoliubov_uv table, got {table.kind.value}")
            qs = table.pair_indices()
        else:
            rng = np.random.default_rng(args.seed)
            table = states.random_uv_table(qs, rng)
            meta = {"seed": args.seed, "table": table_payload(table)}
        ratios = {q: abs(v / u) for q, (u, v) in table.values.items()}
        cutoff = max(states.default_pair_cutoff(r) for r in ratios.values())
        registry = states.bogoliubov_registry(
            [q for q in qs], condensate_cutoff=2 * cutoff, pair_cutoff=cutoff
        )
        state = states.bogoliubov_unprojected(registry, table, cutoff=cutoff)
        rows = []
        worst = 0.0
        s0 = mode_entanglement(state, (0,))
        rows.append(
            {
                "mode": "0",
                "c_abs": None,
                "S_bruteforce": s0,
                "S_analytic": 0.0,
                "abs_err": abs(s0),
                "tv_approx": None,
                "approx_residual": None,
            }
        )
        worst = abs(s0)
        for i, q in enumerate(qs):
            r = ratios[q]
            s_analytic = analytic.distribution_entropy(
                analytic.geometric_pair_distribution(r, cutoff)
            )
            s_brute = mode_entanglement(state, (1 + 2 * i,))
            err = abs(s_brute - s_analytic)
            worst = max(worst, err)
            rows.append(
                {
                    "mode": _momentum_cell(q),
                    "c_abs": r,
                    "S_bruteforce": s_brute,
                    "S_analytic": s_analytic,
                    "abs_err": err,
                    "tv_approx": None,
                    "approx_residual": None,
                }
            )
    else:
        total = args.n
        if args.c != "random":
            table = load_amplitude_table(args.c)
            if table.kind is not TableKind.BOGOLIUBOV_C:
                raise ValueError(f"need a bogoliubov_c table, got {table.kind.value}")
            qs = table.pair_indices()
        else:
            rng = np.random.default_rng(args.seed)
            table = states.random_bogoliubov_c_table(qs, rng)
            meta = {"seed": args.seed, "table": table_payload(table)}
        registry = states.bogoliubov_registry(
            [q for q in qs], condensate_cutoff=total, pair_cutoff=total // 2
        )
        state = states.bogoliubov_projected(registry, table, total)
        rows = []
        x0 = analytic.bogoliubov_x0_exact(table.values, total)
        x0_approx = analytic.bogoliubov_x0_approx(table.values, total)
        s0_brute = mode_entanglement(state, (0,))
        s0_analytic = analytic.distribution_entropy(x0)
        worst = abs(s0_brute - s0_analytic)
        rows.append(
            {
                "mode": "0",
                "c_abs": None,
                "S_bruteforce": s0_brute,
                "S_analytic": s0_analytic,
                "abs_err": abs(s0_brute - s0_analytic),
                "tv_approx": analytic.total_variation(x0, x0_approx.probabilities),
                "approx_residual": x0_approx.residual,
            }
        )
        for i, q in enumerate(qs):
            x1 = analytic.bogoliubov_x1_exact(table.values, total, q)
            x1_approx = analytic.bogoliubov_x1_approx(table.values, total, q)
            s_brute = mode_entanglement(state, (1 + 2 * i,))
            s_analytic = analytic.distribution_entropy(x1)
            err = abs(s_brute - s_analytic)
            worst = max(worst, err)
            rows.append(
                {
                    "mode": _momentum_cell(q),
                    "c_abs": abs(table.values[q]),
                    "S_bruteforce": s_brute,
                    "S_analytic": s_analytic,
                    "abs_err": err,
                    "tv_approx": analytic.total_variation(x1, x1_approx.probabilities),
                    "approx_residual": x1_approx.residual,
                }
            )
    columns = [
        "mode",
        "c_abs",
        "S_bruteforce",
        "S_analytic",
        "abs_err",
        "tv_approx",
        "approx_residual",
    ]
    emit_table(rows, columns, args.format, args.out)
    _write_meta(args.out, meta)
    _summary(worst, args.tol)
    return 0


# ---------------------------------------------------------------------------
# scenario: dynamics


def _parse_times(text: str) -> np.ndarray:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError("time grid must be start:stop:steps")
        start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
        if steps < 1:
            raise ValueError("time grid needs at least one step")
        return np.linspace(start, stop, steps)
    return np.array([float(x) for x in text.split(",")])


def run_dynamics(args) -> int:
    hamiltonian = load_hamiltonian(args.hamiltonian)
    occupations = tuple(int(x) for x in args.initial.split(","))
    state = basis_state(hamiltonian.registry, occupations)
    subset = tuple(int(x) for x in args.subset.split(","))
    times = _parse_times(args.times)
    if args.check_basis:
        report = check_proper_basis(hamiltonian)
        print(
            f"proper basis: {report.proper} "
            f"(one-body off-diagonal max {report.off_diagonal:.3e})"
        )
    rows = []
    worst = 0.0
    for t, evolved in zip(times, evolve_many(state, hamiltonian, times)):
        norm_err = abs(evolved.norm() - 1.0)
        worst = max(worst, norm_err)
        rows.append(
            {
                "time": float(t),
                "entropy": mode_entanglement(evolved, subset),
                "norm_err": norm_err,
            }
        )
    columns = ["time", "entropy", "norm_err"]
    emit_table(rows, columns, args.format, args.out)
    _summary(worst, args.tol)
    return 0


# ---------------------------------------------------------------------------
# scenario: verify


def run_verify(args) -> int:
    results = verification.run_all(args.seed)
    for result in results:
        print(result.line())
    passed = sum(1 for r in results if r.passed)
    print(f"{passed}/{len(results)} criteria passed")
    if args.out is not None:
        rows = [
            {
                "criterion": r.criterion,
                "name": r.name,
                "passed": r.passed,
                "max_abs_err": r.max_abs_err,
                "detail": r.detail,
            }
            for r in results
        ]
        columns = ["criterion", "name", "passed", "max_abs_err", "detail"]
        emit_table(rows, columns, args.format, args.out)
    return 0 if passed == len(results) else 1


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fockent",
        description=(
            "Occupation-number entanglement scenarios: brute-force reduced "
            "density matrices against closed-form entropies."
        ),
    )
    subparsers = parser.add_subparsers(dest="scenario", required=True)

    def common(sub):
        sub.add_argument("--out", default=None, help="output file (default: stdout)")
        sub.add_argument("--format", choices=("csv", "json"), default="csv")
        sub.add_argument("--seed", type=int, default=42, help="seed for random draws")
        sub.add_argument(
            "--tol", type=float, default=1e-10, help="tolerance for the summary line"
        )

    fermi = subparsers.add_parser("fermi", help="filled-sea separability table")
    fermi.add_argument("--modes", type=int, default=8)
    fermi.add_argument("--filled", type=int, default=None)
    common(fermi)
    fermi.set_defaults(func=run_fermi)

    exciton = subparsers.add_parser("exciton", help="electron-hole pair entropies")
    exciton.add_argument("--electrons", type=int, default=3)
    exciton.add_argument("--holes", type=int, default=3)
    exciton.add_argument(
        "--channel",
        choices=[c.value for c in ExcitonChannel],
        default=ExcitonChannel.SPINLESS.value,
    )
    exciton.add_argument("--table", default=None, help="amplitude table JSON path")
    common(exciton)
    exciton.set_defaults(func=run_exciton)

    qh = subparsers.add_parser("qh", help="fractional-filling entropy")
    qh.add_argument(
        "--filling",
        action="append",
        required=True,
        help="filling factor as an exact rational, e.g. 7/3 (repeatable)",
    )
    common(qh)
    qh.set_defaults(func=run_qh)

    bcs = subparsers.add_parser("bcs", help="pair-state occupation entropies")
    bcs.add_argument("--modes", type=int, default=6, help="number of pair modes")
    bcs.add_argument("--n", type=int, default=6, help="particle number (projected)")
    bcs.add_argument("--g", default="random", help="amplitude table JSON path or 'random'")
    bcs.add_argument("--unprojected", action="store_true")
    bcs.add_argument(
        "--unpaired", type=int, default=None, help="unpaired momentum for odd n"
    )
    common(bcs)
    bcs.set_defaults(func=run_bcs)

    bogoliubov = subparsers.add_parser(
        "bogoliubov", help="condensate pair-excitation entropies"
    )
    bogoliubov.add_argument("--pairs", type=int, default=3, help="number of (q,-q) pairs")
    bogoliubov.add_argument("--n", type=int, default=6, help="particle number (projected)")
    bogoliubov.add_argument(
        "--c", default="random", help="amplitude table JSON path or 'random'"
    )
    bogoliubov.add_argument("--unprojected", action="store_true")
    common(bogoliubov)
    bogoliubov.set_defaults(func=run_bogoliubov)

    dynamics = subparsers.add_parser("dynamics", help="entropy along a trajectory")
    dynamics.add_argument("--hamiltonian", required=True, help="Hamiltonian JSON path")
    dynamics.add_argument(
        "--initial", required=True, help="comma-separated occupations, e.g. 1,0,1,0"
    )
    dynamics.add_argument("--times", default="0:5:50", help="start:stop:steps or list")
    dynamics.add_argument("--subset", default="0", help="comma-separated mode indices")
    dynamics.add_argument("--check-basis", action="store_true")
    common(dynamics)
    dynamics.set_defaults(func=run_dynamics)

    verify = subparsers.add_parser("verify", help="run the acceptance suite")
    common(verify)
    verify.set_defaults(func=run_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SizeGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (NormalizationError, NumericalInvariantError, TruncationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
