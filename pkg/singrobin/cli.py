from __future__ import annotations

import argparse
import logging
import math
import sys
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__
from .asymptotics import (
    AsymptoticModel,
    compare_spectrum_to_model,
    compute_theta0,
    pseudo_mode_residual,
    register_index,
)
from .config import RunConfig, SettingsError, load_env, load_settings
from .errors import PotentialFormatError, SingRobinError
from .models import BoundaryParams, SpectrumWindow
from .pencil import (
    PencilGeometry,
    herglotz_samples,
    pencil_negative_eigenvalues,
    pencil_poles,
    pencil_sweep,
    regime_threshold,
    truncation_drift,
)
from .radial import RadialPotential
from .recovery import recover, recover_roundtrip
from .spectrum import assemble_spectrum_Lprime, negative_tail
from .store import RunStore, read_tail

LOG = logging.getLogger("singrobin")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

SPECTRUM_HEADER = ("index", "mode_n", "lambda", "bracket_residual")
SWEEP_HEADER = ("lambda", "E_value", "min_eig_MplusC", "N_used")
HERGLOTZ_HEADER = ("lambda_re", "lambda_im", "E_re", "E_im", "herglotz_sign")


def resolve_potential(source: str) -> RadialPotential:
    """'zero', a number (constant q) or the path of an (r, q) CSV table."""
    text = source.strip()
    if text.lower() == "zero":
        return RadialPotential.zero()
    try:
        value = float(text)
    except ValueError:
        return RadialPotential.from_csv(text)
    if not math.isfinite(value):
        raise SettingsError(f"Invalid config: constant potential must be finite, got {source!r}")
    return RadialPotential.constant(value)


def _params(config: RunConfig) -> BoundaryParams:
    if config.b is None:
        raise SettingsError("Invalid config: missing required parameter 'b' (--b)")
    return BoundaryParams(b=config.b, beta=config.beta)


def _window(config: RunConfig) -> SpectrumWindow:
    return SpectrumWindow(lambda_min=config.lambda_min, lambda_max=config.lambda_max)


def cmd_spectrum(config: RunConfig, store: RunStore) -> dict[str, Any]:
    q = resolve_potential(config.q)
    records = assemble_spectrum_Lprime(
        _params(config), q, _window(config), config.mode_cutoff, config.tolerances, config.workers
    )
    store.write_csv(
        "spectrum.csv",
        SPECTRUM_HEADER,
        ((r.index, r.mode, r.lam, r.bracket_residual) for r in records),
    )
    negatives = sum(1 for r in records if r.lam < 0)
    LOG.info("spectrum: %d eigenvalues (%d negative)", len(records), negatives)
    return {"eigenvalues": len(records), "negative": negatives}


def cmd_asymptotics(config: RunConfig, store: RunStore) -> dict[str, Any]:
    params = _params(config)
    q = resolve_potential(config.q)
    tol = config.tolerances
    theta = compute_theta0(params.b, tol)
    records = negative_tail(params, q, config.n_tail, tol)
    model = register_index(AsymptoticModel(params.b, params.beta, theta.theta0), records, tol)
    pseudo = None
    if config.pseudo_modes:
        pseudo = {r.index: pseudo_mode_residual(r.index, params, q=q, tol=tol).log_residual for r in records}
    report = compare_spectrum_to_model(records, model, pseudo)
    header = list(report.header)
    if pseudo is not None:
        header[-1] = "pseudo_mode_log_residual"
        rows = report.as_rows()
    else:
        header = header[:-1]
        rows = [row[:-1] for row in report.as_rows()]
    store.write_csv("asymptotics.csv", header, rows)
    return {"theta0": theta.theta0, "A": theta.A, "B": theta.B, "index_shift": model.index_shift}


def _herglotz_points() -> list[complex]:
    xs = np.linspace(-50.0, -2.0, 5)
    ys = (0.1, 1.0, -3.0, 10.0)
    return [complex(x, y) for x in xs for y in ys]


def cmd_pencil(config: RunConfig, store: RunStore) -> dict[str, Any]:
    params = _params(config)
    q = resolve_potential(config.q)
    tol = config.tolerances
    geometry = PencilGeometry(outer_radius=config.outer_radius)
    N = config.truncation
    threshold = regime_threshold(q, geometry)
    window = _window(config)
    roots = pencil_negative_eigenvalues(params, q, window, N, geometry, tol, config.workers)
    top = min(window.lambda_max, threshold)
    poles = pencil_poles(params, q, SpectrumWindow(lambda_min=window.lambda_min, lambda_max=top), tol)

    grid = -np.exp(np.linspace(math.log(-top), math.log(-window.lambda_min), config.sweep_points))
    sweep = pencil_sweep(params, q, [float(x) for x in grid], N, geometry, tol, config.workers)
    store.write_csv("pencil_sweep.csv", SWEEP_HEADER, ((r.lam, r.E, r.min_eig, r.N) for r in sweep))
    store.write_csv(
        "pencil_roots.csv",
        ("lambda", "kernel_residual", "pole_below", "pole_above"),
        (
            (lam, cert.residual, below.lam, above.lam)
            for (lam, cert), below, above in zip(roots, poles[:-1], poles[1:])
        ),
    )
    summary: dict[str, Any] = {"threshold": threshold, "roots": len(roots), "poles": len(poles)}
    if config.check_truncation:
        drift = truncation_drift(params, q, window, N, geometry, tol)
        store.write_csv("pencil_drift.csv", ("root_N", "root_2N", "relative_drift"), drift)
        summary["max_drift"] = max((row[2] for row in drift), default=0.0)
    if config.complex_sweep:
        samples = herglotz_samples(params, q, _herglotz_points(), N, geometry, tol)
        store.write_csv(
            "herglotz.csv",
            HERGLOTZ_HEADER,
            ((s.lam.real, s.lam.imag, s.E.real, s.E.imag, s.sign) for s in samples),
        )
        summary["min_herglotz_sign"] = min(s.sign for s in samples)
    return summary


def cmd_recover(config: RunConfig, store: RunStore) -> dict[str, Any]:
    tol = config.tolerances
    if config.tail:
        tail = read_tail(config.tail)
        result = recover(tail, tol)
    else:
        result = recover_roundtrip(_params(config), resolve_potential(config.q), config.n_tail, tol)
    store.write_csv(
        "recovery.csv",
        ("gap", "b_gap_estimate", "atan_beta_estimate"),
        (
            (i, b_est, atan_est)
            for i, (b_est, atan_est) in enumerate(zip(result.b_estimates, result.atan_beta_estimates))
        ),
    )
    summary = result.summary()
    store.write_text("recovery.txt", summary)
    sys.stdout.write(summary)
    return {"b_hat": result.b_hat, "beta_hat": result.beta_hat, "theta0": result.theta0, **result.diagnostics}


COMMANDS: dict[str, Callable[[RunConfig, RunStore], dict[str, Any]]] = {
    "spectrum": cmd_spectrum,
    "asymptotics": cmd_asymptotics,
    "pencil": cmd_pencil,
    "recover": cmd_recover,
}


def _tolerance_pair(text: str) -> tuple[str, str]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    key, value = text.split("=", 1)
    return key.strip().replace("-", "_"), value.strip()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="singrobin",
        description="Spectra of the Laplacian with a singular Robin condition on a half-disc",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub = commands.add_parser(name)
        sub.add_argument("--config", help="YAML or key=value file; flags override it")
        sub.add_argument("--b", type=float)
        sub.add_argument("--beta", type=float)
        sub.add_argument("--q", help="zero, a constant, or an (r, q) CSV path")
        sub.add_argument("--lambda-min", type=float)
        sub.add_argument("--lambda-max", type=float)
        sub.add_argument("--truncation", type=int)
        sub.add_argument("--mode-cutoff", type=int)
        sub.add_argument("--outer-radius", type=float)
        sub.add_argument("--workers", type=int)
        sub.add_argument("--n-tail", type=int)
        sub.add_argument("--tail", help="eigenvalue tail CSV for recover")
        sub.add_argument("--pseudo-modes", action="store_true", default=None)
        sub.add_argument("--check-truncation", action="store_true", default=None)
        sub.add_argument("--complex-sweep", action="store_true", default=None)
        sub.add_argument("--sweep-points", type=int)
        sub.add_argument("--output-dir")
        sub.add_argument("--tol", action="append", type=_tolerance_pair, default=[], metavar="KEY=VALUE")
        sub.add_argument("--log-level")
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    keys = (
        "b", "beta", "q", "lambda_min", "lambda_max", "truncation", "mode_cutoff", "outer_radius",
        "workers", "n_tail", "tail", "pseudo_modes", "check_truncation", "complex_sweep",
        "sweep_points", "output_dir",
    )
    overrides: dict[str, Any] = {key: getattr(args, key) for key in keys if getattr(args, key) is not None}
    if args.tol:
        overrides["tolerances"] = dict(args.tol)
    return overrides


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    env = load_env()
    logging.basicConfig(
        level=(args.log_level or env.log_level).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        config = load_settings(args.config or env.config_path, _overrides(args))
        store = RunStore(config.output_dir)
        results = COMMANDS[args.command](config, store)
        store.write_manifest(args.command, config.model_dump(mode="json"), results)
    except (SettingsError, PotentialFormatError) as exc:
        LOG.error("%s", exc)
        return EXIT_CONFIG
    except ValueError as exc:
        LOG.error("invalid input: %s", exc)
        return EXIT_CONFIG
    except SingRobinError as exc:
        LOG.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL
    return EXIT_OK


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
