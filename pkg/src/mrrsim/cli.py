"""Command-line entry point: ``mrrsim <subcommand> [options]``.

Exit codes: 0 success, 1 validation error, 2 I/O error. Diagnostics go to
stderr; reports go to ``--out``/``--out-dir`` or stdout.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .cost import COMPONENTS, EnergyTable, layer_edp
from .device import MrrParams, NoiseParams, device_curve
from .dse import DseConstraints, select_config
from .encoding import decode_value, encode_signed_digits, osa_mac
from .errors import MrrSimError
from .inference import ToyModel, accuracy_eval, layer_degradation_profile, load_toy_model, make_eval_set, run_inference
from .mapper import LayerProfile, MapperParams, select_mappings
from .reporting import Report, emit_report
from .simulator import MappingMode, OpeConfig
from .workload import builtin_workloads, load_network

EXIT_OK, EXIT_VALIDATION, EXIT_IO = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit 2, which is reserved for I/O
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _ope_triplet(text: str) -> tuple[int, int, int]:
    try:
        t, r, c = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected T,R,C (three integers)") from None
    return t, r, c


def build_parser() -> argparse.ArgumentParser:
    # global flags are accepted before or after the subcommand; SUPPRESS keeps a
    # subparser from overwriting a value given at the top level
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common)

    p = _Parser(prog="mrrsim", description="Microring optical accelerator simulator.")
    _global_flags(p)
    p.add_argument("--version", action="version", version=f"mrrsim {__version__}")
    sub = p.add_subparsers(dest="command", metavar="command", parser_class=_Parser)

    s = sub.add_parser("device-curve", parents=[common], help="voltage sweep of the device chain")
    s.add_argument("--out", type=Path, help="output file (overrides --out-dir)")
    s.add_argument("--points", type=int, default=256)

    s = sub.add_parser("mac-sim", parents=[common], help="shift-and-add MAC vs direct dot product")
    s.add_argument("--nlambda", type=int, required=True)
    s.add_argument("--nt", type=int, required=True)
    s.add_argument("--trials", type=int, default=8)

    s = sub.add_parser("energy", parents=[common], help="per-layer energy/delay/EDP")
    s.add_argument("--workload", type=Path, required=True)
    s.add_argument("--ope", type=_ope_triplet, default=(1, 8, 8), help="T,R,C")
    s.add_argument("--mode", choices=("ws", "is"), default="ws")
    s.add_argument("--no-osa", action="store_true")
    s.add_argument("--nt", type=int, default=7)

    s = sub.add_parser("dse", parents=[common], help="array-size exploration")
    s.add_argument("--workloads", type=Path, nargs="+", help="default: all bundled workloads")
    s.add_argument("--lambda", dest="lam", type=float, default=0.5)
    s.add_argument("--mode", choices=("ws", "is"), default="ws")
    s.add_argument("--no-osa", action="store_true")
    s.add_argument("--nt", type=int, default=7)
    s.add_argument("--c-max", type=int, default=8)
    s.add_argument("--total-mrr-max", type=int, default=1024)

    s = sub.add_parser("profile", parents=[common], help="layer-wise accuracy degradation")
    _model_args(s)
    s.add_argument("--mode", choices=("ws", "is"), default="ws")

    s = sub.add_parser("map", parents=[common], help="layer-wise hybrid mapping decision")
    _model_args(s)
    s.add_argument("--workload", type=Path, help="layer shapes for EDP (default: the model's own)")
    s.add_argument("--ope", type=_ope_triplet, default=(1, 8, 8), help="T,R,C")
    s.add_argument("--alpha-min", type=float, default=0.01)
    s.add_argument("--gamma", type=float, default=0.1)
    s.add_argument("--d-tol", type=float, default=1.0)
    return p


GLOBAL_DEFAULTS = {"seed": 0, "out_dir": None, "format": None, "params": None, "energy_table": None}


def _global_flags(p: argparse.ArgumentParser) -> None:
    sup = argparse.SUPPRESS
    p.add_argument("--seed", type=int, default=sup, help="global seed recorded in every report (default 0)")
    p.add_argument("--out-dir", type=Path, default=sup, help="write <command>.<format> here instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), default=sup, help="report format (default csv; json for map)")
    p.add_argument("--params", type=Path, default=sup, help="MrrParams JSON (default: built-in values)")
    p.add_argument("--energy-table", type=Path, default=sup, help="EnergyTable JSON (default: built-in values)")


def _model_args(s: argparse.ArgumentParser) -> None:
    s.add_argument("--model", type=Path, help="toy model JSON sidecar (default: bundled)")
    s.add_argument("--sigma-dac", type=float, default=0.02)
    s.add_argument("--sigma-th", type=float, default=0.04)
    s.add_argument("--reps", type=int, default=5)
    s.add_argument("--eval-seed", type=int, default=0)
    s.add_argument("--eval-size", type=int, default=512)


def _require_files(*paths: Path | None) -> None:
    for path in paths:
        if path is not None and not Path(path).is_file():
            raise FileNotFoundError(f"no such file: {path}")


def _common_config(args) -> tuple[dict, MrrParams, EnergyTable]:
    _require_files(args.params, args.energy_table)
    mrr = MrrParams.from_json(args.params) if args.params else MrrParams()
    table = EnergyTable.from_json(args.energy_table) if args.energy_table else EnergyTable()
    prov = {
        "command": args.command,
        "seed": args.seed,
        "version": __version__,
        "params_path": str(args.params) if args.params else None,
        "energy_table_path": str(args.energy_table) if args.energy_table else None,
        "mrr_params": mrr.to_dict(),
    }
    return prov, mrr, table


def cmd_device_curve(args) -> Report:
    prov, mrr, _ = _common_config(args)
    if args.points < 2:
        raise MrrSimError("--points must be >= 2")
    curve = device_curve(mrr, args.points)
    cols = ["V", "dT", "dlambda", "T_diff", "w"]
    rows = [[float(curve[c][i]) for c in cols] for i in range(args.points)]
    prov["points"] = args.points
    return Report(args.command, prov, cols, rows)


def cmd_mac_sim(args) -> Report:
    prov, _, _ = _common_config(args)
    if args.nlambda < 1 or args.nt < 0 or args.trials < 1:
        raise MrrSimError("require --nlambda >= 1, --nt >= 0, --trials >= 1")
    rng = np.random.default_rng(args.seed)
    rows = []
    for trial in range(args.trials):
        w = rng.uniform(-1, 1, args.nlambda)
        x = rng.uniform(-1, 1, args.nlambda)
        streams = [encode_signed_digits(float(v), args.nt) for v in x]
        osa = osa_mac(list(w), streams)
        direct = float(sum(wk * decode_value(s) for wk, s in zip(w, streams)))
        rows.append([trial, osa, direct, abs(osa - direct), float(np.dot(w, x))])
    prov.update(nlambda=args.nlambda, nt=args.nt, trials=args.trials)
    return Report(args.command, prov, ["trial", "osa", "direct", "abs_error", "unquantized"], rows)


def cmd_energy(args) -> Report:
    prov, _, table = _common_config(args)
    _require_files(args.workload)
    net = load_network(args.workload)
    t, r, c = args.ope
    ope = OpeConfig(tiles=t, rows=r, cols=c, n_t=args.nt, osa_enabled=not args.no_osa)
    mode = MappingMode(args.mode)
    cols = ["layer", "name", "M", "K", "N", "energy_j", "delay_s", "edp", *COMPONENTS]
    rows, totals = [], {"energy_j": 0.0, "delay_s": 0.0, "edp": 0.0}
    for i, (spec, g) in enumerate(zip(net.layers, net.gemms())):
        lc = layer_edp(g, ope, mode, table)
        rows.append([i, spec.name, g.m, g.k, g.n, lc.energy_j, lc.delay_s, lc.edp,
                     *(lc.breakdown[k] for k in COMPONENTS)])
        totals["energy_j"] += lc.energy_j
        totals["delay_s"] += lc.delay_s
        totals["edp"] += lc.edp
    prov.update(workload=str(args.workload), network=net.name, ope=ope.to_dict(), mode=mode.value,
                energy_table=table.to_dict())
    return Report(args.command, prov, cols, rows, extra={"totals": totals},
                  comments=[f"total_edp: {totals['edp']:.12g}"])


def cmd_dse(args) -> Report:
    prov, _, table = _common_config(args)
    if not 0 <= args.lam <= 1:
        raise MrrSimError(f"--lambda must lie in [0, 1], got {args.lam}")
    if args.workloads:
        _require_files(*args.workloads)
        nets = [load_network(p) for p in args.workloads]
    else:
        nets = builtin_workloads()
    base = OpeConfig(n_t=args.nt, osa_enabled=not args.no_osa)
    cons = DseConstraints(c_max=args.c_max, total_mrr_max=args.total_mrr_max)
    result = select_config(nets, cons, args.lam, table, MappingMode(args.mode), base)
    cols = ["T", "R", "C", *(f"EDP_{n}" for n in result.networks), "G", "W_max", "M"]
    rows = [[row.tiles, row.rows, row.cols, *(row.edps[n] for n in result.networks), row.g, row.w_max, row.m]
            for row in result.rows]
    ch = result.chosen
    chosen = {"T": ch.tiles, "R": ch.rows, "C": ch.cols, "M": ch.m}
    prov.update(workloads=[str(p) for p in args.workloads] if args.workloads else "builtin",
                networks=result.networks, lam=args.lam, mode=args.mode, base_ope=base.to_dict(),
                constraints={"c_max": cons.c_max, "total_mrr_max": cons.total_mrr_max,
                             "t_values": list(cons.t_values), "r_values": list(cons.r_values),
                             "c_values": list(cons.c_values)},
                energy_table=table.to_dict())
    return Report(args.command, prov, cols, rows, extra={"chosen": chosen},
                  comments=[f"chosen: T={ch.tiles} R={ch.rows} C={ch.cols} M={ch.m:.12g}"])


def _model_setup(args, prov: dict) -> tuple[ToyModel, object, NoiseParams]:
    _require_files(args.model)
    if args.reps < 1 or args.eval_size < 1:
        raise MrrSimError("--reps and --eval-size must be >= 1")
    model = load_toy_model(args.model)
    ev = make_eval_set(model, args.eval_seed, args.eval_size)
    noise = NoiseParams(args.sigma_dac, args.sigma_th, args.seed)
    prov.update(model=str(args.model) if args.model else "builtin", eval_seed=args.eval_seed,
                eval_size=args.eval_size, noise=noise.to_dict(), reps=args.reps)
    return model, ev, noise


def cmd_profile(args) -> Report:
    prov, mrr, _ = _common_config(args)
    model, ev, noise = _model_setup(args, prov)
    ope = OpeConfig(n_t=model.n_t)
    clean = accuracy_eval(model, ev)
    rows = []
    for i, layer in enumerate(model.layers):
        d = layer_degradation_profile(model, ev, i, MappingMode(args.mode), reps=args.reps,
                                      ope=ope, mrr=mrr, noise=noise)
        rows.append([i, layer.name, args.mode, clean, d])
    prov.update(mode=args.mode, ope=ope.to_dict())
    return Report(args.command, prov, ["layer", "name", "mode", "clean_accuracy", "degradation_pct"], rows)


def cmd_map(args) -> Report:
    prov, mrr, table = _common_config(args)
    model, ev, noise = _model_setup(args, prov)
    if args.workload is not None:
        _require_files(args.workload)
        net = load_network(args.workload)
    else:
        net = model.network()
    if len(net.layers) != len(model.layers):
        raise MrrSimError(f"workload has {len(net.layers)} layers, model has {len(model.layers)}")
    params = MapperParams(args.alpha_min, args.gamma, args.d_tol)
    t, r, c = args.ope
    ope = OpeConfig(tiles=t, rows=r, cols=c, n_t=model.n_t)
    sim_ope = OpeConfig(n_t=model.n_t)
    profiles = []
    for i, (layer, g) in enumerate(zip(model.layers, net.gemms())):
        d = {m: layer_degradation_profile(model, ev, i, m, reps=args.reps, ope=sim_ope, mrr=mrr, noise=noise)
             for m in (MappingMode.IS, MappingMode.WS)}
        e = {m: layer_edp(g, ope, m, table).edp for m in (MappingMode.IS, MappingMode.WS)}
        profiles.append(LayerProfile(layer.name, d[MappingMode.IS], d[MappingMode.WS],
                                     e[MappingMode.IS], e[MappingMode.WS]))
    decision = select_mappings(profiles, params)

    def mean_accuracy(modes):
        return float(np.mean([run_inference(model, ev, modes, sim_ope, mrr, noise, noise.rng(1000 + s))
                              for s in range(args.reps)]))

    all_ws = [MappingMode.WS] * len(profiles)
    comparison = {
        "hybrid": {"edp": decision.total_edp(), "accuracy": mean_accuracy(decision.modes)},
        "all_ws": {"edp": sum(p.e_ws for p in profiles), "accuracy": mean_accuracy(all_ws)},
        "clean_accuracy": accuracy_eval(model, ev),
    }
    prov.update(workload=str(args.workload) if args.workload else "model", ope=ope.to_dict(),
                mapper=asdict(params), energy_table=table.to_dict())
    cols = ["name", "chosen", "alpha", "m_is", "m_ws", "d_is", "d_ws", "e_is", "e_ws"]
    rows = [[l.name, l.chosen.value, l.alpha, l.m_is, l.m_ws, l.d_is, l.d_ws, l.e_is, l.e_ws]
            for l in decision.layers]
    h, w = comparison["hybrid"], comparison["all_ws"]
    return Report(args.command, prov, cols, rows,
                  extra={"decision": decision.to_dict(), "comparison": comparison},
                  comments=[f"hybrid: edp={h['edp']:.12g} accuracy={h['accuracy']:.12g}",
                            f"all_ws: edp={w['edp']:.12g} accuracy={w['accuracy']:.12g}"])


COMMANDS = {
    "device-curve": cmd_device_curve,
    "mac-sim": cmd_mac_sim,
    "energy": cmd_energy,
    "dse": cmd_dse,
    "profile": cmd_profile,
    "map": cmd_map,
}


def cmd_dispatch(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        for key, value in GLOBAL_DEFAULTS.items():
            if not hasattr(args, key):
                setattr(args, key, value)
        if args.command is None:
            parser.print_usage(sys.stderr)
            raise UsageError("mrrsim: error: a subcommand is required")
        report = COMMANDS[args.command](args)
        fmt = args.format or ("json" if args.command == "map" else "csv")
        path = getattr(args, "out", None)
        if path is None and args.out_dir is not None:
            args.out_dir.mkdir(parents=True, exist_ok=True)
            path = args.out_dir / f"{args.command}.{fmt}"
        emit_report(report, fmt, path, sys.stdout)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"mrrsim: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (MrrSimError, ValueError) as exc:
        print(f"mrrsim: invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def main() -> None:
    sys.exit(cmd_dispatch())
