"""Command-line front end.

Exit codes: 0 success, 1 validation or usage error, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .chain import System, instruction_baseband, synthesize
from .config import RunConfig, dump_config, load_config
from .envelope_compiler import compile as compile_shape
from .envelope_generator import PULSE_CYCLES, render_instruction
from .errors import (CalibrationRangeError, NotProgrammedError, NumericalError,
                     PreconditionError, ValidationError)
from .experiments import (calibrate_lo_null, calibrate_pi_amplitude, run_rabi,
                          run_three_gate)
from .output import heatmap, line_plot, rabi_csv, rabi_svg, three_gate_csv, write_atomic
from .selftest import run_selftest
from .signal_core import IQTrace, TimeGrid, trace_to_csv
from .transmon_sim import trajectory_table
from .waveform_memory import (N_SLOTS, WaveformMemory, encode_memory,
                              estimate_control_data_rate, select_and_trigger,
                              store_instruction)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", default=None,
                   help="JSON run config, or 'default' for built-in values")
    p.add_argument("--seed", type=int, default=None, help="master seed (overrides config)")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--svg", action="store_true", help="also write SVG plots")
    p.add_argument("--no-leakage", action="store_true", help="force LO leakage to zero")
    p.add_argument("--jobs", type=int, default=None,
                   help="worker processes (default: number of processors)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="cryoxy", description="Cryogenic XY pulse modulator and transmon model")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")
    sub.required = True

    sub.add_parser("compile", parents=[common], help="shapes -> memory image + weight table")
    sub.add_parser("waveforms", parents=[common], help="render all stored waveforms")
    p = sub.add_parser("dump-envelope", parents=[common], help="print one slot's 22-sample I/Q envelope")
    p.add_argument("--slot", type=int, default=0)
    p = sub.add_parser("trajectory", parents=[common], help="state trajectory under one slot")
    p.add_argument("--slot", type=int, default=1)

    p = sub.add_parser("rabi", parents=[common], help="amplitude Rabi sweep")
    p.add_argument("--pulses", choices=("one", "two"), default=None)
    p.add_argument("--shots", type=int, default=None)
    p.add_argument("--dac", choices=("ideal", "cryo_perturbed"), default=None)

    p = sub.add_parser("three-gate", parents=[common], help="X(theta) R_phi(pi) X(theta) sweep")
    p.add_argument("--ideal", action="store_true",
                   help="ideal hardware, two-level qubit, calibrated amplitudes")
    p.add_argument("--calibrated", action="store_true", help="use the area law for amplitudes")
    p.add_argument("--shots", type=int, default=None, help="0 = noiseless probabilities")

    sub.add_parser("lo-null", parents=[common], help="find AT1/PH1 minimizing idle excitation")

    p = sub.add_parser("datarate", parents=[common], help="digital control data rate")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--standard", action="store_true")
    g.add_argument("--ic", action="store_true")
    p.add_argument("--channels", type=int, default=2)
    p.add_argument("--bits-per-sample", type=int, default=14)
    p.add_argument("--sample-rate", type=float, default=1e9)
    p.add_argument("--bits-per-gate", type=int, default=5)
    p.add_argument("--gate-period", type=float, default=22e-9)

    sub.add_parser("selftest", parents=[common], help="run the invariant battery")
    sub.add_parser("config", parents=[common], help="print the resolved config as JSON")
    return parser


def _resolve(args) -> RunConfig:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, master_seed=args.seed)
    if args.no_leakage:
        cfg = replace(cfg, modulator=replace(cfg.modulator, leak_amplitude=0.0))
    return cfg


def _jobs(args) -> int:
    return args.jobs if args.jobs is not None else (os.cpu_count() or 1)


def _memory(cfg: RunConfig) -> WaveformMemory:
    mem = WaveformMemory(code_p=cfg.code_p)
    for slot, spec in enumerate(cfg.waveforms):
        compiled = compile_shape(spec.shape, spec.amplitude, spec.phase)
        mem = store_instruction(mem, slot, compiled.instruction)
    return mem


def _with_lo_null(cfg: RunConfig, system: System, *, echo=print) -> System:
    if not cfg.lo_null.enabled or system.modulator.leak_amplitude == 0:
        return system
    res = calibrate_lo_null(system, cfg.lo_null.idle_time)
    echo(f"lo-null: at1={res.setting.at1} ph1={res.setting.ph1} "
         f"residual_p1={res.residual_p1:.3e} (uncancelled {res.uncancelled_p1:.3e})")
    return replace(system, cancel=res.setting)


def cmd_compile(args, cfg: RunConfig) -> int:
    mem = _memory(cfg)
    lines = [f"# code_p={cfg.code_p}",
             "slot,label,kind,amplitude,phase,code_n_i,code_n_q,pol_i,pol_q,residual,weights"]
    for slot, spec in enumerate(cfg.waveforms):
        compiled = compile_shape(spec.shape, spec.amplitude, spec.phase)
        ins = compiled.instruction
        lines.append(f"{slot},{spec.label},{spec.shape.kind},{spec.amplitude:.6g},{spec.phase:.6g},"
                     f"{ins.code_n_i},{ins.code_n_q},{ins.pol_i:+d},{ins.pol_q:+d},"
                     f"{compiled.residual:.3e},{' '.join(map(str, ins.w_i))}")
    write_atomic(args.out / "memory.bin", encode_memory(mem))
    write_atomic(args.out / "weights.txt", "\n".join(lines) + "\n")
    print(f"wrote {args.out / 'memory.bin'} ({mem.occupied} slots) and {args.out / 'weights.txt'}")
    return 0


def cmd_dump_envelope(args, cfg: RunConfig) -> int:
    instr = select_and_trigger(_memory(cfg), args.slot)
    system = cfg.system()
    iq = render_instruction(instr, cfg.code_p, system.envelope, system.dac)
    signed = IQTrace(iq.grid, instr.pol_i * iq.i_samples, instr.pol_q * iq.q_samples)
    sys.stdout.write(trace_to_csv(signed))
    return 0


def cmd_waveforms(args, cfg: RunConfig) -> int:
    mem = _memory(cfg)
    system = cfg.system()
    pulses = []
    for slot in range(N_SLOTS):
        if mem.slots[slot] is None:
            continue
        instr = select_and_trigger(mem, slot)
        bb = instruction_baseband(instr, mem.code_p, system)
        pulses.append(bb)
        env = IQTrace(TimeGrid(system.envelope.f_clk, PULSE_CYCLES), bb.real, bb.imag)
        write_atomic(args.out / f"envelope_{slot:02d}.csv", trace_to_csv(env))
    syn = synthesize(pulses, system)
    rf = syn.rf(system)
    write_atomic(args.out / "waveforms_rf.csv", trace_to_csv(rf))
    if args.svg:
        t = rf.grid.times() * 1e9
        write_atomic(args.out / "waveforms_rf.svg",
                     line_plot([("RF", t, rf.samples)], "stored waveforms, stepped by select lines",
                               "time (ns)", "output (V)", width=1200))
    print(f"rendered {len(pulses)} waveforms, {rf.grid.n_samples} RF samples "
          f"at {rf.grid.sample_rate:g} Hz -> {args.out}")
    return 0


def cmd_trajectory(args, cfg: RunConfig) -> int:
    from .chain import evolve
    instr = select_and_trigger(_memory(cfg), args.slot)
    system = cfg.system()
    state, hist = evolve([instruction_baseband(instr, cfg.code_p, system)], system, trajectory=True)
    syn = synthesize([instruction_baseband(instr, cfg.code_p, system)], system)
    dt = syn.grid.dt * syn.grid.n_samples / (hist.shape[0] - 1)
    table = trajectory_table(hist, dt)
    rows = ["t,p0,p1,p2,x,y,z"] + [",".join(f"{v:.12g}" for v in row) for row in table]
    write_atomic(args.out / "trajectory.csv", "\n".join(rows) + "\n")
    p = np.abs(state.amplitudes) ** 2
    print(f"final populations p0={p[0]:.6f} p1={p[1]:.6f} p2={p[2]:.3e}")
    return 0


def cmd_rabi(args, cfg: RunConfig) -> int:
    rcfg = cfg.rabi
    if args.pulses:
        rcfg = replace(rcfg, pulses=args.pulses)
    if args.shots is not None:
        rcfg = replace(rcfg, shots=args.shots)
    if args.dac:
        rcfg = replace(rcfg, dac_mode=args.dac)
    system = _with_lo_null(cfg, cfg.system())
    result = run_rabi(rcfg, system, cfg.master_seed, _jobs(args))
    write_atomic(args.out / "rabi.csv", rabi_csv(result))
    if args.svg:
        write_atomic(args.out / "rabi.svg", rabi_svg(result))
    best = result.best()
    print(f"rabi: {len(result.rows)} points, best p1_meas={best.p1_measured:.4f} "
          f"at ip={best.ip_code} in={best.in_code}")
    return 0


def cmd_three_gate(args, cfg: RunConfig) -> int:
    tcfg = cfg.three_gate
    if args.shots is not None:
        tcfg = replace(tcfg, shots=args.shots)
    if args.ideal:
        system = System.ideal(transmon=cfg.transmon, modulator=cfg.modulator,
                              envelope=cfg.envelope, dac=cfg.dac, confusion=cfg.confusion)
        tcfg = replace(tcfg, calibrated=True)
    else:
        system = _with_lo_null(cfg, cfg.system())
        if args.calibrated:
            tcfg = replace(tcfg, calibrated=True)
    cal = None
    if not tcfg.calibrated:
        cal = calibrate_pi_amplitude(system, tcfg.shape, cfg.code_p, _jobs(args))
        print(f"pi calibration: code_p={cal.code_p} code_n={cal.code_n} p1={cal.p1:.4f}")
    result = run_three_gate(tcfg, system, cal, cfg.master_seed, _jobs(args))
    write_atomic(args.out / "three_gate.csv", three_gate_csv(result))
    if args.svg:
        write_atomic(args.out / "three_gate.svg", heatmap(result.p1_measured, "three-gate P(|1>)"))
    print(f"rms_error={result.rms_error:.12g}")
    return 0


def cmd_lo_null(args, cfg: RunConfig) -> int:
    res = calibrate_lo_null(cfg.system(), cfg.lo_null.idle_time)
    print(f"at1={res.setting.at1} ph1={res.setting.ph1} residual_p1={res.residual_p1:.6e} "
          f"uncancelled_p1={res.uncancelled_p1:.6e}")
    return 0


def cmd_datarate(args, cfg: RunConfig) -> int:
    std = estimate_control_data_rate("standard_awg", channels=args.channels,
                                     bits_per_sample=args.bits_per_sample,
                                     sample_rate=args.sample_rate)
    ic = estimate_control_data_rate("ic_streaming", bits_per_gate=args.bits_per_gate,
                                    gate_period=args.gate_period)
    if args.standard:
        print(f"{std / 1e9:.3f} Gbps")
    elif args.ic:
        print(f"{ic / 1e9:.3f} Gbps")
    else:
        print(f"standard_awg: {std / 1e9:.3f} Gbps")
        print(f"ic_streaming: {ic / 1e9:.3f} Gbps")
    return 0


def cmd_selftest(args, cfg: RunConfig) -> int:
    return 0 if run_selftest(cfg.master_seed) else 1


def cmd_config(args, cfg: RunConfig) -> int:
    sys.stdout.write(dump_config(cfg))
    return 0


COMMANDS = {
    "compile": cmd_compile,
    "waveforms": cmd_waveforms,
    "dump-envelope": cmd_dump_envelope,
    "trajectory": cmd_trajectory,
    "rabi": cmd_rabi,
    "three-gate": cmd_three_gate,
    "lo-null": cmd_lo_null,
    "datarate": cmd_datarate,
    "selftest": cmd_selftest,
    "config": cmd_config,
}


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _resolve(args)
        return COMMANDS[args.command](args, cfg)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, NotProgrammedError, CalibrationRangeError,
            PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
