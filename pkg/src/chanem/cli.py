"""Command-line surface.

Subcommands: materials, trace, cir, emulate, kpi, check-ofdm, report, bench.
stdout carries only data; human-readable context goes to stderr.  Exit
codes: 0 success, 2 parse/format errors, 3 precondition violations,
4 end of scenario.
"""

import argparse
import contextlib
import os
import socket
import sys

from . import __version__
from .bench import bench
from .cir import CirConfig, DEFAULT_TAP_BUDGET
from .emulator import (CARRY, ZERO, EmulatorConfig, EmulatorState, IqSlot,
                       calibrate_signal_gain, convolve_slot)
from .errors import (ChanemError, EndOfScenario, FormatError,
                     InvalidInputError, ScenarioParseError)
from .iqstream import (STREAM_VERSION, read_frame, write_frame)
from .kpi import (LinkConfig, TddPattern, effective_throughput, max_bitrate,
                  mcs_lookup, ofdm_feasibility, tdd_occupancy)
from .materials import evaluate_material, get_material
from .scenefile import load_profile
from .timeline import (TIMELINE_VERSION, build_scenario, read_timeline,
                       report, timeline_from_profiles, write_path_gain_csv,
                       write_pdp_csv, write_report_rows_csv, write_timeline)
from .emulator import SlotFormat

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_END_OF_SCENARIO = 4

SEED_ENV_VAR = "OWDT_SEED"


def _default_seed():
    return int(os.environ.get(SEED_ENV_VAR, "0"))


def _cmd_materials(args):
    props = evaluate_material(get_material(args.material), args.freq_hz)
    print(f"eps_r={props.eps_r:.10g}")
    print(f"sigma_c={props.sigma_c:.10g}")
    return EXIT_OK


def _cmd_trace(args):
    cfg = CirConfig(f_samp=args.fsamp, max_delay_spread=args.max_delay)
    timeline = build_scenario(args.scene, args.trace, cfg, max_depth=args.max_depth)
    write_timeline(timeline, args.out)
    print(f"snapshots={len(timeline)}", file=sys.stderr)
    return EXIT_OK


def _cmd_cir(args):
    profile = load_profile(args.profile)
    cfg = CirConfig(f_samp=args.fsamp, max_delay_spread=args.max_delay)
    timeline = timeline_from_profiles([profile], cfg, t_int=args.t_int)
    write_timeline(timeline, args.out)
    return EXIT_OK


def _cmd_kpi(args):
    tdd = TddPattern.parse(args.pattern, args.special)
    base = LinkConfig.band_n77_40mhz()
    cfg = LinkConfig(
        numerology_mu=args.mu, bandwidth=base.bandwidth, n_prb=args.nprb,
        overhead_dl=args.oh_dl, overhead_ul=args.oh_ul, tdd=tdd,
        fft_size=base.fft_size, f_samp=base.f_samp,
        carrier_freq=base.carrier_freq,
    )
    mcs = mcs_lookup(args.mcs)
    alpha_dl, alpha_ul = tdd_occupancy(tdd)
    alpha = alpha_dl if args.dir == "dl" else alpha_ul
    r_b = max_bitrate(cfg, mcs, args.dir)
    t_eff = effective_throughput(cfg, mcs, args.bler, args.dir)
    print(f"r_b_mbps={r_b:.6f}")
    print(f"alpha={alpha:.6f}")
    print(f"t_eff_mbps={t_eff:.6f}")
    return EXIT_OK


def _cmd_check_ofdm(args):
    base = LinkConfig.band_n77_40mhz()
    cfg = LinkConfig(
        numerology_mu=args.mu, bandwidth=base.bandwidth, n_prb=base.n_prb,
        overhead_dl=base.overhead_dl, overhead_ul=base.overhead_ul,
        tdd=base.tdd, fft_size=args.fft, f_samp=args.fsamp,
        carrier_freq=args.freq_hz,
    )
    verdict = ofdm_feasibility(cfg, args.sigma_tau, args.speed, margin=args.margin)
    print(f"sigma_tau_s={verdict.rms_delay_spread:.9g}")
    print(f"t_gi_s={verdict.guard_interval:.9g}")
    print(f"t_ofdm_s={verdict.symbol_duration:.9g}")
    print(f"t_f_s={verdict.fading_period:.9g}")
    print(f"f_d_hz={verdict.doppler_freq:.6f}")
    print(f"isi_ok={verdict.isi_ok}")
    print(f"guard_ok={verdict.guard_ok}")
    print(f"coherence_ok={verdict.coherence_ok}")
    return EXIT_OK


def _cmd_report(args):
    timeline = read_timeline(args.timeline)
    rows = report(timeline, args.taps)
    if args.rows:
        with open(args.rows, "w", encoding="utf-8") as fh:
            write_report_rows_csv(rows, fh)
    else:
        write_report_rows_csv(rows, sys.stdout)
    if args.pdp:
        with open(args.pdp, "w", encoding="utf-8") as fh:
            write_pdp_csv(timeline, fh)
    if args.gain:
        with open(args.gain, "w", encoding="utf-8") as fh:
            write_path_gain_csv(timeline, fh)
    return EXIT_OK


def _cmd_bench(args):
    fmt = SlotFormat(fft_size=args.fft, f_samp=args.fsamp)
    stats = bench(args.slots, args.taps, fmt, seed=args.seed,
                  noise_power_db=args.noise_db)
    print(f"slots={stats.slot_count}")
    print(f"taps={stats.l_sel}")
    print(f"samples_per_slot={stats.samples_per_slot}")
    print(f"min_s={stats.min_s:.9f}")
    print(f"median_s={stats.median_s:.9f}")
    print(f"p99_s={stats.p99_s:.9f}")
    print(f"max_s={stats.max_s:.9f}")
    print(f"budget_s={stats.budget_s:.9f}")
    print(f"passed={stats.passed}")
    return EXIT_OK


@contextlib.contextmanager
def _frame_streams(args):
    """Yield (reader, writer) byte streams for emulate from pipe/file/TCP."""
    if args.listen:
        host, _, port = args.listen.rpartition(":")
        server = socket.create_server((host or "127.0.0.1", int(port)))
        print(f"listening on {args.listen}", file=sys.stderr)
        conn, peer = server.accept()
        print(f"connection from {peer}", file=sys.stderr)
        rf = conn.makefile("rb")
        wf = conn.makefile("wb")
        try:
            yield rf, wf
        finally:
            wf.flush()
            rf.close()
            wf.close()
            conn.close()
            server.close()
        return
    rf = sys.stdin.buffer if args.input == "-" else open(args.input, "rb")
    wf = sys.stdout.buffer if args.out == "-" else open(args.out, "wb")
    try:
        yield rf, wf
    finally:
        wf.flush()
        if rf is not sys.stdin.buffer:
            rf.close()
        if wf is not sys.stdout.buffer:
            wf.close()


def _cmd_emulate(args):
    import time

    timeline = read_timeline(args.timeline)
    if not timeline.snapshots:
        raise InvalidInputError("timeline holds no snapshots")
    if args.signal_gain_db == "auto":
        gain_db = calibrate_signal_gain(timeline.snapshots)
        print(f"auto signal gain: {gain_db:.3f} dB", file=sys.stderr)
    else:
        gain_db = float(args.signal_gain_db)

    fmt = SlotFormat(fft_size=args.fft, f_samp=timeline.config.f_samp)
    cfg = EmulatorConfig(
        sorted_timeline=timeline.sorted_snapshots(args.taps),
        t_int=timeline.t_int,
        slot_format=fmt,
        l_max=timeline.config.l_max,
        signal_gain_db=gain_db,
        noise_power_db=args.noise_db,
        rng_seed=args.seed,
        history_mode=args.history,
    )
    state = EmulatorState(cfg)

    stats_fh = open(args.stats, "w", encoding="utf-8") if args.stats else None
    if stats_fh:
        stats_fh.write("slot_index,latency_s,clipped_samples\n")
    ended = False
    try:
        with _frame_streams(args) as (rf, wf):
            while True:
                frame = read_frame(rf)
                if frame is None:
                    break
                slot_index, samples, in_fmt = frame
                t0 = time.perf_counter()
                try:
                    out = convolve_slot(state, cfg, IqSlot(slot_index, samples))
                except EndOfScenario:
                    ended = True
                    break
                latency = time.perf_counter() - t0
                clipped = write_frame(wf, out.slot_index, out.samples, fmt=in_fmt)
                if stats_fh:
                    stats_fh.write(f"{out.slot_index},{latency:.9f},{clipped}\n")
    finally:
        if stats_fh:
            stats_fh.close()
    if ended:
        print("end of scenario reached with input remaining", file=sys.stderr)
        return EXIT_END_OF_SCENARIO
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="chanem",
        description="Site-specific channel emulation: trace scenes into CIR "
                    "timelines, convolve IQ streams, evaluate NR link KPIs.",
    )
    parser.add_argument("--version", action="version",
                        version=f"chanem {__version__} "
                                f"(timeline format v{TIMELINE_VERSION}, "
                                f"iq frame format v{STREAM_VERSION})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("materials", help="evaluate material properties")
    p.add_argument("--material", required=True)
    p.add_argument("--freq-hz", type=float, required=True)
    p.set_defaults(func=_cmd_materials)

    p = sub.add_parser("trace", help="trace a scene along a mobility trace into a CIR timeline")
    p.add_argument("--scene", required=True)
    p.add_argument("--trace", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("--fsamp", type=float, default=46.08e6)
    p.add_argument("--max-delay", type=float, default=3e-6)
    p.set_defaults(func=_cmd_trace)

    p = sub.add_parser("cir", help="discretize a delay-profile CSV into a timeline")
    p.add_argument("--profile", required=True)
    p.add_argument("--fsamp", type=float, required=True)
    p.add_argument("--max-delay", type=float, default=3e-6)
    p.add_argument("--t-int", type=float, default=0.1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_cir)

    p = sub.add_parser("emulate", help="convolve an IQ frame stream with a timeline")
    p.add_argument("--timeline", required=True)
    p.add_argument("--taps", type=int, default=DEFAULT_TAP_BUDGET)
    p.add_argument("--signal-gain-db", default="auto")
    p.add_argument("--noise-db", type=float, default=float("-inf"))
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--history", choices=[CARRY, ZERO], default=CARRY)
    p.add_argument("--fft", type=int, default=1536)
    p.add_argument("--in", dest="input", default="-")
    p.add_argument("--out", default="-")
    p.add_argument("--listen", default=None, metavar="HOST:PORT")
    p.add_argument("--stats", default=None)
    p.set_defaults(func=_cmd_emulate)

    p = sub.add_parser("kpi", help="bitrate / occupancy / effective throughput")
    p.add_argument("--mcs", type=int, required=True)
    p.add_argument("--bler", type=float, required=True)
    p.add_argument("--dir", choices=["dl", "ul"], required=True)
    p.add_argument("--pattern", default="DDDSU")
    p.add_argument("--special", default="6,4,4")
    p.add_argument("--nprb", type=int, default=106)
    p.add_argument("--mu", type=int, default=1)
    p.add_argument("--oh-dl", type=float, default=0.14)
    p.add_argument("--oh-ul", type=float, default=0.08)
    p.set_defaults(func=_cmd_kpi)

    p = sub.add_parser("check-ofdm", help="evaluate the OFDM timing feasibility chain")
    p.add_argument("--speed", type=float, required=True)
    p.add_argument("--freq-hz", type=float, default=4.01916e9)
    p.add_argument("--mu", type=int, default=1)
    p.add_argument("--fft", type=int, default=1536)
    p.add_argument("--fsamp", type=float, default=46.08e6)
    p.add_argument("--sigma-tau", type=float, default=0.0)
    p.add_argument("--margin", type=float, default=10.0)
    p.set_defaults(func=_cmd_check_ofdm)

    p = sub.add_parser("report", help="per-snapshot report rows, PDP matrix, path gain")
    p.add_argument("--timeline", required=True)
    p.add_argument("--taps", type=int, default=DEFAULT_TAP_BUDGET)
    p.add_argument("--rows", default=None)
    p.add_argument("--pdp", default=None)
    p.add_argument("--gain", default=None)
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("bench", help="measure per-slot convolution latency")
    p.add_argument("--slots", type=int, required=True)
    p.add_argument("--taps", type=int, required=True)
    p.add_argument("--fft", type=int, default=1536)
    p.add_argument("--fsamp", type=float, default=46.08e6)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--noise-db", type=float, default=float("-inf"))
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "seed", None) is None and hasattr(args, "seed"):
        args.seed = _default_seed()
    try:
        return args.func(args)
    except (ScenarioParseError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except EndOfScenario as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_END_OF_SCENARIO
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ChanemError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
