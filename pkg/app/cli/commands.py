"""
Subcommands of the nvpair command line.

Every handler receives the container and the parsed arguments, writes its
tables through the result writer and returns an exit status.
"""

import argparse
import logging
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from app.application.imaging.service import reference_observations
from app.application.noise.service import FIELD_NOISE_REGIMES
from app.config.settings import NoiseCorrelation, RunConfig
from app.container import Container
from app.infrastructure.storage.readers import parse_candidates, read_observations, read_trace
from .error_handler import EXIT_OK

logger = logging.getLogger(__name__)

Handler = Callable[[Container, argparse.Namespace], int]


def _float_list(text: str) -> List[float]:
    return [float(v) for v in text.replace(",", " ").split()]


def _int_list(text: str) -> List[int]:
    return [int(v) for v in text.replace(",", " ").split()]


def _observed_responses(text: str):
    """'28.441:1,239.035:0' -> [(28.441, True), (239.035, False)]."""
    pairs = []
    for item in text.split(","):
        frequency, _, responded = item.strip().partition(":")
        pairs.append((float(frequency), responded.strip() not in ("0", "", "false", "no")))
    return pairs


# HANDLERS

def cmd_constants(container: Container, args: argparse.Namespace) -> int:
    container.result_writer().write_json("constants", container.spectro_service().constants_report())
    return EXIT_OK


def cmd_couplings(container: Container, args: argparse.Namespace) -> int:
    service = container.spectro_service()
    writer = container.result_writer()
    pairs = parse_candidates(args.pairs) if args.pairs else None
    writer.write_csv("couplings", service.couplings_table(pairs))
    if args.reference:
        writer.write_csv("resonance_check", service.reference_resonance_check())
    if args.fraction:
        writer.write_json("resonant_fraction", service.resonant_fraction((args.target_jt, args.target_m_i)))
    return EXIT_OK


def cmd_dd_spectrum(container: Container, args: argparse.Namespace) -> int:
    units = args.units or container.settings.DD_UNITS
    tau_grid = np.arange(args.tau_min, args.tau_max + 0.5 * args.tau_step, args.tau_step)
    rows = container.dynamics_service(args.reps).dd_spectrum(tau_grid, units)
    container.result_writer().write_csv("dd_spectrum", rows)
    return EXIT_OK


def cmd_trace(container: Container, args: argparse.Namespace) -> int:
    service = container.dynamics_service()
    trace = service.synthesize_trace(args.measurements, True if args.initial_signal else None)
    writer = container.result_writer()
    if args.raw:
        writer.write_csv("trace", [{"outcome": int(v)} for v in trace.outcomes])
    else:
        writer.write_csv("trace_bins", service.trace_rows(trace))
    return EXIT_OK


def cmd_rf_truthtable(container: Container, args: argparse.Namespace) -> int:
    service = container.rf_service()
    writer = container.result_writer()
    axes = ["A", "B", "C", "D"] if args.jt.upper() == "ALL" else [args.jt]
    frequencies = _float_list(args.frequencies) if args.frequencies else None
    rows = []
    for axis in axes:
        rows.extend(service.truth_table_rows(
            axis, frequencies, snap=not args.no_snap, include_nuclear_drive=not args.no_nuclear_drive,
            anchor=not args.no_anchor,
        ))
    writer.write_csv("rf_truthtable", rows)
    if args.observed:
        matches = service.assign(_observed_responses(args.observed), use_reference=not args.simulated_tables)
        writer.write_csv("rf_assignment", matches, columns=["jt", "state_a", "state_b"])
    return EXIT_OK


def cmd_rf_trace(container: Container, args: argparse.Namespace) -> int:
    rows = container.rf_service().rabi_rows(args.jt, args.state, args.frequency, args.samples)
    container.result_writer().write_csv("rf_trace", rows)
    return EXIT_OK


def cmd_fit(container: Container, args: argparse.Namespace) -> int:
    path = args.observations or container.context.observations_file
    observations = read_observations(path) if path else reference_observations()
    settings = container.settings
    service = container.imaging_service()
    report = service.fit(
        observations,
        n_starts_p1=args.starts_p1 or settings.FIT_STARTS_P1,
        n_starts_nv=args.starts_nv or settings.FIT_STARTS_NV,
    )
    writer = container.result_writer()
    writer.write_json("fit", service.report_dict(report))
    return EXIT_OK


def cmd_benchmark(container: Container, args: argparse.Namespace) -> int:
    settings = container.settings
    rows = container.imaging_service().benchmark(
        n_positions=args.positions,
        n_noisy_sets=args.noisy_sets,
        noise_std=args.noise if args.noise is not None else settings.BENCH_NOISE_STD,
        n_starts_p1=args.starts_p1 or settings.FIT_STARTS_P1,
        n_starts_nv=args.starts_nv or settings.FIT_STARTS_NV,
    )
    container.result_writer().write_csv("benchmark", rows)
    return EXIT_OK


def cmd_noise_coupling(container: Container, args: argparse.Namespace) -> int:
    sigma = _float_list(args.sigma) if args.sigma else FIELD_NOISE_REGIMES[args.regime]
    summary, samples = container.noise_service().coupling_noise(
        sigma, NoiseCorrelation(args.correlation), args.samples, _int_list(args.local_axes),
    )
    writer = container.result_writer()
    writer.write_json("noise_coupling", summary)
    writer.write_csv("noise_coupling_samples", samples)
    return EXIT_OK


def cmd_dephasing(container: Container, args: argparse.Namespace) -> int:
    service = container.noise_service()
    summary, rows = service.dephasing(
        x_khz=args.x,
        field_sigma_gauss=args.field_sigma_mg * 1e-3,
        max_time_ms=args.max_time,
        n_times=args.points,
        n_samples=args.samples,
        m_s=args.ms,
        z_khz=args.z,
    )
    writer = container.result_writer()
    writer.write_json("dephasing", summary)
    writer.write_csv("dephasing_curve", rows)
    writer.write_csv("clock_sensitivity", service.clock_sensitivity(summary["X_kHz"]))
    return EXIT_OK


def cmd_init_opt(container: Container, args: argparse.Namespace) -> int:
    settings = container.settings
    path = args.trace or container.context.trace_file
    if path and not args.synthetic:
        trace = read_trace(path)
    else:
        trace = container.dynamics_service().synthesize_trace(args.measurements, initial_signal=True)
    second = None if args.no_second_check else tuple(settings.INIT_SECOND_CHECK)
    report, surface = container.protocol_service().optimize_initialization(
        trace,
        theta_set=_int_list(args.theta_set) if args.theta_set else settings.INIT_THETA_SET,
        lambda_max=args.lambda_max if args.lambda_max is not None else settings.INIT_LAMBDA_MAX,
        n_successes=args.successes or settings.INIT_SUCCESSES,
        second_check=second,
    )
    writer = container.result_writer()
    writer.write_json("init_opt", report)
    writer.write_csv("init_surface", surface)
    return EXIT_OK


def cmd_readout_opt(container: Container, args: argparse.Namespace) -> int:
    model = container.readout_model(p_a=args.p_a, p_b=args.p_b, contrast_decay=args.decay)
    report, rows = container.protocol_service().optimize_readout(
        model, n_max=args.n_max or container.settings.READOUT_N_MAX, shots=args.shots,
    )
    writer = container.result_writer()
    writer.write_json("readout_opt", report)
    writer.write_csv("readout_curve", rows)
    return EXIT_OK


def cmd_noise_budget(container: Container, args: argparse.Namespace) -> int:
    service = container.noise_service()
    writer = container.result_writer()
    writer.write_csv("noise_budget", service.budget(not args.no_field_noise, args.samples))
    if args.bath_configs:
        settings = container.settings
        summary, _ = service.carbon_bath(
            settings.CARBON_CONCENTRATION, args.bath_configs, settings.CARBON_CUTOFF_KHZ,
            settings.CARBON_RADIUS_NM, settings.DIAMOND_LATTICE_NM,
        )
        writer.write_json("carbon_bath", summary)
    return EXIT_OK


COMMANDS: Dict[str, Handler] = {
    "constants": cmd_constants,
    "couplings": cmd_couplings,
    "dd-spectrum": cmd_dd_spectrum,
    "trace": cmd_trace,
    "rf-truthtable": cmd_rf_truthtable,
    "rf-trace": cmd_rf_trace,
    "fit": cmd_fit,
    "benchmark": cmd_benchmark,
    "noise-coupling": cmd_noise_coupling,
    "dephasing": cmd_dephasing,
    "init-opt": cmd_init_opt,
    "readout-opt": cmd_readout_opt,
    "noise-budget": cmd_noise_budget,
}


# PARSER

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nvpair", description="NV-P1-P1 spin simulation and geometry toolkit")
    parser.add_argument("--config", help="flat JSON run configuration")
    parser.add_argument("--seed", type=int, help="master random seed")
    parser.add_argument("--threads", type=int, help="worker threads")
    parser.add_argument("--out", help="output directory (default: standard output)")
    parser.add_argument("--field", type=float, nargs=3, metavar=("BX", "BY", "BZ"), help="magnetic field in G")
    parser.add_argument("--jt", dest="global_jt", help="JT axis of the configuration")
    parser.add_argument("--m-I", dest="m_I", type=int, choices=(-1, 0, 1), help="nitrogen projection")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    sub.add_parser("constants", help="physical constants and working point")

    p = sub.add_parser("couplings", help="X, Z, D1, D2 for 4 JT x 3 m_I configurations")
    p.add_argument("--pairs", help="state pairs 'a/b;c/d' instead of the fixed-nitrogen pairs")
    p.add_argument("--reference", action="store_true", help="also check the tabulated resonances")
    p.add_argument("--fraction", action="store_true", help="also count resonant configurations")
    p.add_argument("--target-jt", default="A")
    p.add_argument("--target-m-i", type=int, default=0, choices=(-1, 0, 1))

    p = sub.add_parser("dd-spectrum", help="simulated decoupling spectrum")
    p.add_argument("--tau-min", type=float, default=5.0)
    p.add_argument("--tau-max", type=float, default=35.0)
    p.add_argument("--tau-step", type=float, default=0.1)
    p.add_argument("--units", type=int)
    p.add_argument("--reps", type=int, help="readout repetitions per point (default DD_REPETITIONS)")

    p = sub.add_parser("trace", help="synthetic repetitive-readout trace")
    p.add_argument("--measurements", type=int, default=1_000_000)
    p.add_argument("--initial-signal", action="store_true")
    p.add_argument("--raw", action="store_true", help="emit per-measurement outcomes")

    p = sub.add_parser("rf-truthtable", help="simulated RF response table")
    p.add_argument("--jt", default="A", help="A, B, C, D or all")
    p.add_argument("--frequencies", help="drive frequencies in MHz instead of the tabulated listing")
    p.add_argument("--no-snap", action="store_true")
    p.add_argument("--no-nuclear-drive", action="store_true")
    p.add_argument("--no-anchor", action="store_true", help="drive the raw simulated spectrum (snapping instead)")
    p.add_argument("--observed", help="observed responses 'f:1,f:0' to assign configurations")
    p.add_argument("--simulated-tables", action="store_true", help="assign against simulated tables")

    p = sub.add_parser("rf-trace", help="Rabi retention trace of one eigenstate")
    p.add_argument("--jt", default="A")
    p.add_argument("--state", default="+u")
    p.add_argument("--frequency", type=float, required=True, help="MHz")
    p.add_argument("--samples", type=int, default=400)

    p = sub.add_parser("fit", help="reconstruct the geometry from couplings")
    p.add_argument("--observations", help="CSV with tau_us, jt, candidates, value_kHz, kind")
    p.add_argument("--starts-p1", type=int)
    p.add_argument("--starts-nv", type=int)

    p = sub.add_parser("benchmark", help="synthetic reconstruction benchmark")
    p.add_argument("--positions", type=int, default=10)
    p.add_argument("--noisy-sets", type=int, default=200)
    p.add_argument("--noise", type=float, help="relative coupling noise")
    p.add_argument("--starts-p1", type=int)
    p.add_argument("--starts-nv", type=int)

    p = sub.add_parser("noise-coupling", help="coupling distribution under field noise")
    p.add_argument("--sigma", help="field noise sx sy sz in G")
    p.add_argument("--regime", choices=("typical", "worst"), default="typical")
    p.add_argument("--correlation", choices=[c.value for c in NoiseCorrelation], default="correlated")
    p.add_argument("--local-axes", default="2")
    p.add_argument("--samples", type=int, default=1000)

    p = sub.add_parser("dephasing", help="pseudo-spin dephasing curve")
    p.add_argument("--x", type=float, help="X in kHz (default: configured pair)")
    p.add_argument("--field-sigma-mg", type=float, default=0.3)
    p.add_argument("--max-time", type=float, default=150.0, help="ms")
    p.add_argument("--points", type=int, default=301)
    p.add_argument("--samples", type=int, default=4000)
    p.add_argument("--ms", type=int, default=0, choices=(-1, 0, 1))
    p.add_argument("--z", type=float, default=0.0, help="Z in kHz")

    p = sub.add_parser("init-opt", help="optimize initialization checks")
    p.add_argument("--trace", help="recorded trace file")
    p.add_argument("--synthetic", action="store_true")
    p.add_argument("--measurements", type=int, default=2_000_000)
    p.add_argument("--theta-set")
    p.add_argument("--lambda-max", type=int)
    p.add_argument("--successes", type=int)
    p.add_argument("--no-second-check", action="store_true")

    p = sub.add_parser("readout-opt", help="optimize readout repetitions and threshold")
    p.add_argument("--n-max", type=int)
    p.add_argument("--shots", type=int, default=0)
    p.add_argument("--p-a", type=float)
    p.add_argument("--p-b", type=float)
    p.add_argument("--decay", type=float)

    p = sub.add_parser("noise-budget", help="table of dephasing sources")
    p.add_argument("--no-field-noise", action="store_true")
    p.add_argument("--samples", type=int, default=400)
    p.add_argument("--bath-configs", type=int, default=0)

    return parser


def configure_container(container: Container, args: argparse.Namespace) -> None:
    config = RunConfig.from_file(args.config) if args.config else None
    container.configure(
        config,
        seed=args.seed,
        threads=args.threads,
        out=args.out,
        field=list(args.field) if args.field else None,
        jt=args.global_jt.upper() if args.global_jt else None,
        m_I=args.m_I,
    )


def run_command(container: Container, args: argparse.Namespace) -> int:
    handler = COMMANDS[args.command]
    logger.info(f"Running {args.command}")
    return handler(container, args)


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)
