#!/usr/bin/env python3
"""
Rational Half-Wave Maps toolkit - command line entry point
hwm.py

Commands:
    validate        check the solution constraints of a datum
    evolve          sample m(t, x) from the explicit resolvent formula
    poles           poles and spins at each time of the grid
    conserved       power traces of L and their drift along the flow
    oracle-compare  explicit formula vs RK4 oracle
    soliton-gen     write a valid datum (single soliton or N >= 2 helper)

Exit codes: 0 ok, 1 runtime error, 2 validation or schema failure.
Tables go to --out (or stdout); logs go to stderr.
"""

import sys
import argparse
import json
import logging
import warnings
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed

# Setup paths
sys.path.insert(0, str(Path(__file__).parent))

from src.modules.config.hwm_config import COMMANDS, RunConfig, create_config_from_args
from src.modules.datasets.rational_data import RationalData, load_datum, save_datum
from src.modules.dynamics.constraints import ConstraintReport, single_soliton, validate
from src.modules.dynamics.lax import char_poly_coefficients, conserved_traces, lax_series, pole_center
from src.modules.evolution.explicit_formula import (
    FrozenEvolution, create_frozen_evolution, field_row, match_by_proximity,
    poles_and_spins_at, total_residue,
)
from src.modules.utils.errors import HWMError, SchemaError, ValidationFailed
from src.modules.utils.table_writer import write_table

logger = logging.getLogger("hwm")

EVOLVE_COLUMNS = ["t", "x", "m1", "m2", "m3", "norm_defect", "im_residual", "singular"]
POLES_COLUMNS = ["t", "j", "re_x", "im_x", "re_s1", "im_s1", "re_s2", "im_s2", "re_s3", "im_s3"]
CONSERVED_COLUMNS = ["k", "re_trace", "im_trace", "drift", "re_charpoly", "im_charpoly", "charpoly_drift"]
ORACLE_COLUMNS = ["t", "sup_err", "pole_err", "spin_err", "norm_defect", "im_residual"]


def setup_logging(log_file: Optional[str] = None, verbose: bool = False):
    """Setup logging configuration"""
    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file, mode='w'))
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )
    return logging.getLogger("hwm")


def parse_arguments(argv: Optional[List[str]] = None):
    """Parse command line arguments"""
    parser = argparse.ArgumentParser(description="Rational Half-Wave Maps: explicit formula and ODE oracle")

    parser.add_argument("command", choices=COMMANDS, help="Command to run")
    parser.add_argument("input", nargs="?", default=None,
                        help="Datum JSON file (not used by soliton-gen)")

    # Windows
    parser.add_argument("--t0", type=float, default=0.0, help="First sample time")
    parser.add_argument("--t1", type=float, default=1.0, help="Last sample time / horizon")
    parser.add_argument("--nt", type=int, default=11, help="Number of sample times")
    parser.add_argument("--xmin", type=float, default=-10.0, help="Left end of the x window")
    parser.add_argument("--xmax", type=float, default=10.0, help="Right end of the x window")
    parser.add_argument("--nx", type=int, default=201, help="Number of x samples")

    # Numerics
    parser.add_argument("--h", type=float, default=1e-3, help="RK4 step of the oracle")
    parser.add_argument("--tol", type=float, default=None,
                        help="Tolerance for the constraint predicates (null, trace, residual)")
    parser.add_argument("--kmax", type=int, default=None, help="Highest power trace (default 2N)")

    # Generator
    parser.add_argument("--n-solitons", dest="n_solitons", type=int, default=1,
                        help="Number of poles for soliton-gen")
    parser.add_argument("--velocity", type=float, default=0.0, help="Single soliton velocity in (-1, 1)")
    parser.add_argument("--phase", type=float, default=0.0, help="Single soliton phase about m0")
    parser.add_argument("--seed", type=int, default=None, help="Seed for the N >= 2 generator")

    # Behaviour / output
    parser.add_argument("--force", action="store_true", help="Proceed on invalid data (negative controls)")
    parser.add_argument("--out", type=str, default=None, help="Output file (stdout if omitted)")
    parser.add_argument("--workers", type=int, default=1, help="Parallel workers for evolve")
    parser.add_argument("--log-file", dest="log_file", type=str, default=None, help="Also log to this file")
    parser.add_argument("--verbose", action="store_true", help="Debug logging and progress bars")

    return parser.parse_args(argv)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def log_report(report: ConstraintReport):
    summary = report.summary()
    status = "✅ valid" if summary["valid"] else "❌ invalid"
    logger.info(f"Datum N={summary['n']}: {status}, max residual {summary['max_residual']:.3e}")
    for issue in summary["failures"]:
        logger.info(f"  ⚠️ {issue}")


def parse_datum(config: RunConfig) -> Tuple[RationalData, ConstraintReport]:
    """
    Load and validate the input datum.

    Raises:
        SchemaError: malformed file
        ValidationFailed: invalid datum and --force not given
    """
    if not config.input_path:
        raise SchemaError("no input datum given", field_path="$")
    data = load_datum(config.input_path)
    report = validate(data, config.tolerances)
    log_report(report)
    if not report.valid and not config.force:
        raise ValidationFailed(f"datum {config.input_path} violates the constraints", report=report)
    return data, report


def _frozen(data: RationalData, config: RunConfig) -> FrozenEvolution:
    return create_frozen_evolution(data, config.tolerances, strict=not config.force)


def _evolve_slice(fe: FrozenEvolution, t: float, xs: np.ndarray) -> List[Dict]:
    return [field_row(fe, float(t), float(x)) for x in xs]


def cmd_evolve(config: RunConfig, data: RationalData) -> List[Dict]:
    """Rows (t, x, m, |m|-1, im_residual, singular), t-major."""
    fe = _frozen(data, config)
    times, xs = config.time_grid(), config.space_grid()
    if config.workers > 1:
        slices = Parallel(n_jobs=config.workers)(delayed(_evolve_slice)(fe, t, xs) for t in times)
    else:
        slices = [_evolve_slice(fe, t, xs) for t in times]
    rows = [row for chunk in slices for row in chunk]

    singular = sum(1 for row in rows if row["singular"])
    if singular:
        logger.warning(f"⚠️ {singular} samples hit a singular resolvent and were flagged")
    bad = [r for r in rows if not r["singular"] and
           (abs(r["norm_defect"]) > config.tolerances.real_tol or r["im_residual"] > config.tolerances.real_tol)]
    if bad:
        logger.warning(f"⚠️ {len(bad)} samples off the sphere or not real beyond {config.tolerances.real_tol:.1e}")
    return rows


def cmd_poles(config: RunConfig, data: RationalData) -> List[Dict]:
    """Rows (t, j, x_j, s_j) with labels carried continuously across time samples."""
    fe = _frozen(data, config)
    rows = []
    previous = data.poles
    for t in config.time_grid():
        snapshot = poles_and_spins_at(fe, float(t))
        order = match_by_proximity(previous, snapshot.poles)
        poles = snapshot.poles[order]
        spins = snapshot.spin_vectors()[order]
        for j in range(snapshot.n):
            row = {"t": float(t), "j": j, "re_x": float(poles[j].real), "im_x": float(poles[j].imag)}
            for c in range(3):
                row[f"re_s{c + 1}"] = float(spins[j, c].real)
                row[f"im_s{c + 1}"] = float(spins[j, c].imag)
            rows.append(row)
        previous = poles
    return rows


def cmd_conserved(config: RunConfig, data: RationalData) -> List[Dict]:
    """
    Tr L^k at t=0 and its max relative drift along an oracle trajectory on [0, t1];
    characteristic polynomial coefficients of λ^(N-k) alongside.
    """
    from src.modules.oracle.ode_oracle import integrate_spin_cm

    fe = _frozen(data, config)
    n = fe.n
    kmax = config.kmax or max(1, 2 * n)
    base_traces = np.array(conserved_traces(fe.L0, kmax))
    base_poly = char_poly_coefficients(fe.L0)

    trace_drift = np.zeros(kmax)
    poly_drift = np.zeros(base_poly.size)
    if config.t1 > 0:
        trajectory = integrate_spin_cm(data, config.t1, config.h, config.tolerances,
                                       strict=not config.force, richardson=False, progress=False)
        for lp in lax_series(trajectory):
            traces = np.array(conserved_traces(lp.L, kmax))
            poly = char_poly_coefficients(lp.L)
            trace_drift = np.maximum(trace_drift, np.abs(traces - base_traces) / np.maximum(1.0, np.abs(base_traces)))
            poly_drift = np.maximum(poly_drift, np.abs(poly - base_poly) / np.maximum(1.0, np.abs(base_poly)))

    center = pole_center(fe.X0, fe.L0, config.t1)
    residue = total_residue(poles_and_spins_at(fe, 0.0))
    logger.info(f"Pole center at t={config.t1}: {center:.6g}")
    logger.info(f"Total residue Σ A_j: {np.round(residue, 12).tolist()}")

    nan = float("nan")
    rows = []
    for k in range(1, kmax + 1):
        has_poly = k < base_poly.size
        rows.append({
            "k": k,
            "re_trace": float(base_traces[k - 1].real),
            "im_trace": float(base_traces[k - 1].imag),
            "drift": float(trace_drift[k - 1]),
            "re_charpoly": float(base_poly[k].real) if has_poly else nan,
            "im_charpoly": float(base_poly[k].imag) if has_poly else nan,
            "charpoly_drift": float(poly_drift[k]) if has_poly else nan,
        })
    return rows


def cmd_oracle_compare(config: RunConfig, data: RationalData, progress: bool = False) -> List[Dict]:
    """Rows (t, sup_err, pole_err, spin_err, |m|-1, im_residual) against an RK4 trajectory."""
    from src.modules.oracle.ode_oracle import compare, integrate_spin_cm

    fe = _frozen(data, config)
    trajectory = integrate_spin_cm(data, config.t1, config.h, config.tolerances,
                                   strict=not config.force, richardson=True, progress=progress)
    report = compare(fe, trajectory, config.time_grid(), config.space_grid(), progress=progress)
    if trajectory.richardson_error is not None:
        logger.info(f"📊 Oracle Richardson estimate: {trajectory.richardson_error:.3e}")
    return [{c: row[c] for c in ORACLE_COLUMNS} for row in report.rows]


def cmd_soliton_gen(config: RunConfig) -> RationalData:
    """A valid datum: the single soliton at x1 = i, or the N >= 2 helper."""
    if config.n_solitons == 1:
        data = single_soliton(1j, phase=config.phase, velocity=config.velocity)
    else:
        from src.modules.datasets.generators import generate_multi_soliton

        seed = 0 if config.seed is None else config.seed
        data = generate_multi_soliton(config.n_solitons, seed=seed, horizon=max(config.t1, 0.0),
                                      tol=config.tolerances)
    report = validate(data, config.tolerances)
    log_report(report)
    if not report.valid:
        raise ValidationFailed("generated datum failed validation", report=report)
    return data


def run(config: RunConfig, progress: bool = False) -> str:
    """Execute one command and return its textual output."""
    if config.command == "soliton-gen":
        data = cmd_soliton_gen(config)
        return save_datum(data, config.output_path) + "\n"

    data, report = parse_datum(config)
    if config.command == "validate":
        text = json.dumps(report.summary(), indent=2) + "\n"
        if config.output_path:
            Path(config.output_path).write_text(text)
        return text

    if config.command == "evolve":
        rows, columns = cmd_evolve(config, data), EVOLVE_COLUMNS
    elif config.command == "poles":
        rows, columns = cmd_poles(config, data), POLES_COLUMNS
    elif config.command == "conserved":
        rows, columns = cmd_conserved(config, data), CONSERVED_COLUMNS
    elif config.command == "oracle-compare":
        rows, columns = cmd_oracle_compare(config, data, progress), ORACLE_COLUMNS
    else:
        raise ValueError(f"Unknown command: {config.command}")
    return write_table(rows, columns, config.output_path)


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    args = parse_arguments(argv)
    setup_logging(args.log_file, args.verbose)

    try:
        config = create_config_from_args(args)
        with warnings.catch_warnings():
            # boundary approaches are logged by the library
            warnings.simplefilter("ignore")
            text = run(config, progress=args.verbose)
        if not config.output_path:
            sys.stdout.write(text)
            sys.stdout.flush()
        logger.info(f"✅ {config.command} completed")
        return 0

    except (ValidationFailed, SchemaError) as e:
        logger.error(f"❌ {args.command} failed validation: {e}")
        return 2

    except (HWMError, ValueError, OSError) as e:
        logger.error(f"❌ {args.command} failed with error: {e}")
        return 1

    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        return 1


if __name__ == "__main__":
    exit_code = main()
    sys.exit(exit_code)
