"""Command line entry point: ``wlmpnn <group> <command> ...``.

Exit codes: 0 success (or "undistinguished"), 1 distinguished,
2 usage error, 3 runtime or resource error.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Sequence

from . import __version__
from .graph import IngestionError, generate_barabasi_albert, generate_erdos_renyi, load_cora, load_edge_list, write_edge_list
from .precision import PrecisionContext, to_hex

EXIT_OK, EXIT_DISTINGUISHED, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3

log = logging.getLogger("wlmpnn")


@dataclass
class RunConfig:
    subcommand: str
    options: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"subcommand": self.subcommand, **self.options}


# --- argument types -------------------------------------------------------------

def _real(text: str) -> float:
    try:
        return float.fromhex(text) if text.lower().lstrip("+-").startswith("0x") else float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def gamma_arg(text: str) -> float | tuple[float, ...]:
    """A gamma in (0, 1), or a comma-separated per-layer list."""
    vals = tuple(_real(t) for t in text.split(","))
    for v in vals:
        if not 0.0 < v < 1.0:
            raise argparse.ArgumentTypeError(f"gamma must lie in (0, 1), got {v}")
    return vals[0] if len(vals) == 1 else vals


def _int_at_least(lo: int):
    def parse(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
        if v < lo:
            raise argparse.ArgumentTypeError(f"must be at least {lo}, got {v}")
        return v
    return parse


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals or any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError("expected positive integers")
    return vals


def _probability(text: str) -> float:
    v = _real(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"probability must lie in [0, 1], got {v}")
    return v


# --- parser --------------------------------------------------------------------

def _add_model_flags(p: argparse.ArgumentParser, gamma_required: bool = True) -> None:
    p.add_argument("--gamma", type=gamma_arg, required=gamma_required,
                   help="gamma in (0,1); decimal or hex float; comma list = one per layer")
    p.add_argument("--bits", type=_int_at_least(2), default=256, help="significand bits")
    p.add_argument("--activation", choices=["sigmoid", "arctan"], default="sigmoid")
    p.add_argument("--scheme", choices=["simplified", "theory"], default="simplified")
    p.add_argument("--encoding", choices=["auto", "constant-one", "sqrt-primes"], default="auto")


def _add_graph(p: argparse.ArgumentParser, name: str = "graph") -> None:
    p.add_argument(name, help="edge-list file")
    p.add_argument(f"--{name}-labels" if name != "graph" else "--labels", dest=f"{name}_labels",
                   default=None, help="optional 'node label' file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wlmpnn", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    groups = parser.add_subparsers(dest="group", required=True)

    wl = groups.add_parser("wl", help="1-WL color refinement").add_subparsers(dest="command", required=True)
    p = wl.add_parser("run")
    _add_graph(p)
    p.add_argument("--max-rounds", type=_int_at_least(0), default=None)
    p.add_argument("--emit-trace", metavar="CSV", default=None)
    p = wl.add_parser("distinguish")
    _add_graph(p, "g1")
    _add_graph(p, "g2")
    p.add_argument("--max-rounds", type=_int_at_least(0), default=None)

    nwl = groups.add_parser("nwl", help="k-order non-folklore WL").add_subparsers(dest="command", required=True)
    p = nwl.add_parser("run")
    _add_graph(p)
    p.add_argument("-k", type=_int_at_least(2), required=True)
    p.add_argument("--budget", type=_int_at_least(1), default=20_000_000)
    p = nwl.add_parser("distinguish")
    _add_graph(p, "g1")
    _add_graph(p, "g2")
    p.add_argument("-k", type=_int_at_least(2), required=True)
    p.add_argument("--budget", type=_int_at_least(1), default=20_000_000)

    mp = groups.add_parser("mpnn", help="one-dimensional MPNN").add_subparsers(dest="command", required=True)
    p = mp.add_parser("run")
    _add_graph(p)
    _add_model_flags(p)
    p.add_argument("--layers", type=_int_at_least(0), required=True)
    p.add_argument("--emit-trace", metavar="CSV", default=None)
    p = mp.add_parser("distinguish")
    _add_graph(p, "g1")
    _add_graph(p, "g2")
    _add_model_flags(p)
    p.add_argument("--layers", type=_int_at_least(0), required=True)

    km = groups.add_parser("kmpnn", help="k-order MPNN").add_subparsers(dest="command", required=True)
    p = km.add_parser("simulate")
    _add_graph(p)
    p.add_argument("-k", type=_int_at_least(2), required=True)
    p.add_argument("--gamma", type=gamma_arg, required=True)
    p.add_argument("--bits", type=_int_at_least(2), default=256)
    p.add_argument("--activation", choices=["sigmoid", "arctan"], default="arctan")
    p.add_argument("--budget", type=_int_at_least(1), default=20_000_000)

    ex = groups.add_parser("experiment", help="experiment drivers").add_subparsers(dest="command", required=True)
    p = ex.add_parser("lottery")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--graphs-dir", default=None, help="directory of *.edges files")
    src.add_argument("--family", choices=["er", "ba"], default=None, help="generate the collection instead")
    p.add_argument("--count", type=_int_at_least(1), default=100)
    p.add_argument("--n-min", type=_int_at_least(2), default=50)
    p.add_argument("--n-max", type=_int_at_least(2), default=250)
    p.add_argument("--m", type=_int_at_least(1), default=2, help="BA attachment count")
    p.add_argument("--avg-degree", type=float, default=4.0, help="ER p = avg_degree / n")
    p.add_argument("--num-gammas", type=_int_at_least(1), default=50)
    p.add_argument("--bits", type=_int_at_least(2), default=256)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=_int_at_least(1), default=1)
    p.add_argument("--out", default=None, help="per-cell CSV (default: stdout summary only)")
    p.add_argument("--summary", default=None, help="per-gamma counts CSV")

    p = ex.add_parser("precision-sweep")
    p.add_argument("--sizes", type=_int_list, default=[50, 100, 200, 400, 800, 1600])
    p.add_argument("--num-gammas", type=_int_at_least(1), default=20)
    p.add_argument("--gamma-max", type=float, default=0.5)
    p.add_argument("--p-max", type=_int_at_least(4), default=1024)
    p.add_argument("--avg-degree", type=float, default=4.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=_int_at_least(1), default=1)
    p.add_argument("--out", default=None)
    p.add_argument("--summary", default=None)

    p = ex.add_parser("classes")
    gsrc = p.add_mutually_exclusive_group(required=True)
    gsrc.add_argument("--graph", default=None, help="edge-list file")
    gsrc.add_argument("--cora", default=None, help="cora.cites file or its directory")
    gsrc.add_argument("--er-n", type=_int_at_least(1), default=None, help="generate G(n, avg/n)")
    p.add_argument("--avg-degree", type=float, default=4.0)
    p.add_argument("--bits-list", type=_int_list, default=[8, 16, 24, 32, 48, 64, 96, 128, 256])
    p.add_argument("--num-gammas", type=_int_at_least(1), default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)

    gen = groups.add_parser("generate", help="write a random graph").add_subparsers(dest="command", required=True)
    p = gen.add_parser("er")
    p.add_argument("--n", type=_int_at_least(1), required=True)
    p.add_argument("--p", type=_probability, default=None, help="default 4/n")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p = gen.add_parser("ba")
    p.add_argument("--n", type=_int_at_least(2), required=True)
    p.add_argument("--m", type=_int_at_least(1), default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    return parser


def parse_cli(argv: Sequence[str] | None = None) -> RunConfig:
    """Validated :class:`RunConfig`; usage errors exit with status 2."""
    parser = build_parser()
    ns = parser.parse_args(argv)
    opts = {k: v for k, v in vars(ns).items() if k not in ("group", "command")}
    if ns.group == "generate" and ns.command == "ba" and ns.m >= ns.n:
        parser.error(f"need m < n, got m={ns.m}, n={ns.n}")
    if ns.group == "experiment" and ns.command == "lottery" and ns.n_min > ns.n_max:
        parser.error("--n-min exceeds --n-max")
    if ns.group == "experiment" and ns.command == "precision-sweep" and not 0 < ns.gamma_max <= 1:
        parser.error("--gamma-max must lie in (0, 1]")
    return RunConfig(f"{ns.group}-{ns.command}", opts)


# --- commands ------------------------------------------------------------------

def _load(path, labels=None):
    return load_edge_list(path, labels)


def _cfg(o):
    from .mpnn import MpnnConfig
    return MpnnConfig(o["gamma"], o["activation"], o["scheme"], o["encoding"])


def _cmd_wl_run(o, rc):
    from .wl import wl_run
    g = _load(o["graph"], o["graph_labels"])
    trace = wl_run(g, o["max_rounds"])
    T = trace.convergence_round
    print(f"nodes={g.n} edges={len(g.edges)} convergence_round={'none' if T is None else T} "
          f"classes={trace.final.num_classes()}")
    if o["emit_trace"]:
        from .report import emit_report
        rows = [{"round": lab.round, "node": v, "color": c}
                for lab in trace.labelings for v, c in enumerate(lab.colors)]
        emit_report(rows, "csv", o["emit_trace"], rc.to_dict(), columns=["round", "node", "color"])
    return EXIT_OK


def _report_outcome(out) -> int:
    if out.distinguished:
        print(f"distinguished at round {out.round}")
        return EXIT_DISTINGUISHED
    print(f"undistinguished after {out.rounds_run} rounds")
    return EXIT_OK


def _cmd_wl_distinguish(o, rc):
    from .wl import wl_distinguish
    g1, g2 = _load(o["g1"], o["g1_labels"]), _load(o["g2"], o["g2_labels"])
    return _report_outcome(wl_distinguish(g1, g2, o["max_rounds"]))


def _cmd_nwl_run(o, rc):
    from .korder import nwl_run
    g = _load(o["graph"], o["graph_labels"])
    trace = nwl_run(g, o["k"], o["budget"])
    print(f"k={o['k']} tuples={g.n ** o['k']} convergence_round={trace.convergence_round} "
          f"classes={trace.final.num_classes()}")
    return EXIT_OK


def _cmd_nwl_distinguish(o, rc):
    from .korder import nwl_distinguish
    g1, g2 = _load(o["g1"], o["g1_labels"]), _load(o["g2"], o["g2_labels"])
    return _report_outcome(nwl_distinguish(g1, g2, o["k"], o["budget"]))


def _cmd_mpnn_run(o, rc):
    from .mpnn import mpnn_readout, mpnn_run
    g = _load(o["graph"], o["graph_labels"])
    ctx = PrecisionContext(o["bits"])
    trace = mpnn_run(g, _cfg(o), o["layers"], ctx)
    for f in trace:
        print(f"round={f.round} distinct_values={f.num_classes()}")
    readout = mpnn_readout(trace[-1], ctx)
    print(f"readout={float(readout)!r} readout_hex={to_hex(readout)}")
    if o["emit_trace"]:
        from .report import emit_report
        rows = [{"round": f.round, "node": v, "feature": x} for f in trace for v, x in enumerate(f.values)]
        emit_report(rows, "csv", o["emit_trace"], rc.to_dict(), columns=["round", "node", "feature_hex", "feature"])
    return EXIT_OK


def _cmd_mpnn_distinguish(o, rc):
    from .mpnn import mpnn_distinguish
    g1, g2 = _load(o["g1"], o["g1_labels"]), _load(o["g2"], o["g2_labels"])
    differ = mpnn_distinguish(g1, g2, _cfg(o), o["layers"], PrecisionContext(o["bits"]))
    print("distinguished" if differ else "undistinguished")
    return EXIT_DISTINGUISHED if differ else EXIT_OK


def _cmd_kmpnn_simulate(o, rc):
    from .korder import k_perfect_simulation
    g = _load(o["graph"], o["graph_labels"])
    ok = k_perfect_simulation(g, o["k"], o["gamma"], PrecisionContext(o["bits"]), o["activation"], o["budget"])
    print(f"perfect={str(ok).lower()}")
    return EXIT_OK


def _graphs_from_dir(path):
    names = sorted(f for f in os.listdir(path) if f.endswith(".edges"))
    out = []
    for name in names:
        base = os.path.join(path, name)
        labels = base[: -len(".edges")] + ".labels"
        out.append((name[: -len(".edges")], load_edge_list(base, labels if os.path.exists(labels) else None)))
    if not out:
        raise IngestionError(path, 0, "no *.edges files found")
    return out


def _cmd_experiment_lottery(o, rc):
    from .harness import draw_gammas, graph_collection, lottery_experiment
    from .report import emit_report
    if o["graphs_dir"]:
        graphs = _graphs_from_dir(o["graphs_dir"])
    else:
        graphs = graph_collection(o["family"] or "er", o["count"], o["n_min"], o["n_max"], o["seed"],
                                  m=o["m"], avg_degree=o["avg_degree"])
    gammas = draw_gammas(o["num_gammas"], o["seed"] + 1)
    res = lottery_experiment(graphs, gammas, PrecisionContext(o["bits"]), workers=o["workers"])
    summary = [{"gamma": g, "perfect_count": c, "num_graphs": res.num_graphs, "lottery": c == res.num_graphs}
               for g, c in zip(res.gammas, res.counts)]
    if o["out"]:
        emit_report(res.records, "csv", o["out"], rc.to_dict())
    if o["summary"]:
        emit_report(summary, "csv", o["summary"], rc.to_dict())
    print(f"lottery gammas: {len(res.lottery_gammas)}/{len(res.gammas)} (graphs={res.num_graphs})")
    return EXIT_OK


def _cmd_experiment_precision_sweep(o, rc):
    from .harness import draw_gammas, precision_sweep
    from .report import emit_report
    gammas = draw_gammas(o["num_gammas"], o["seed"] + 1, o["gamma_max"])
    records, summary = precision_sweep(o["sizes"], gammas, o["seed"], o["p_max"], o["avg_degree"],
                                       workers=o["workers"])
    if o["out"]:
        emit_report(records, "csv", o["out"], rc.to_dict())
    if o["summary"]:
        emit_report(summary, "csv", o["summary"], rc.to_dict())
    for s in summary:
        print(f"n={s.n} mean_bits={s.mean_bits:.2f} sd={s.sd_bits:.2f} found={s.num_found}/{s.num_gammas}")
    return EXIT_OK


def _cmd_experiment_classes(o, rc):
    from .harness import class_count_vs_precision, draw_gammas, sparse_er_probability
    from .report import emit_report
    if o["graph"]:
        g, gid = load_edge_list(o["graph"]), os.path.basename(o["graph"])
    elif o["cora"]:
        g, gid = load_cora(o["cora"]), "cora"
    else:
        n = o["er_n"]
        g, gid = generate_erdos_renyi(n, sparse_er_probability(n, o["avg_degree"]), o["seed"]), f"er-n{n}-s{o['seed']}"
    gammas = draw_gammas(o["num_gammas"], o["seed"] + 1)
    records = class_count_vs_precision(g, gammas, o["bits_list"], graph_id=gid)
    if o["out"]:
        emit_report(records, "csv", o["out"], rc.to_dict())
    wl_classes = records[0].wl_classes if records else 0
    print(f"graph={gid} nodes={g.n} wl_classes={wl_classes}")
    for bits in o["bits_list"]:
        counts = [r.mpnn_classes for r in records if r.bits == bits]
        print(f"bits={bits} mpnn_classes min={min(counts)} max={max(counts)} "
              f"at_wl={sum(c == wl_classes for c in counts)}/{len(counts)}")
    return EXIT_OK


def _cmd_generate_er(o, rc):
    p = o["p"] if o["p"] is not None else min(1.0, 4.0 / o["n"])
    write_edge_list(generate_erdos_renyi(o["n"], p, o["seed"]), o["out"])
    return EXIT_OK


def _cmd_generate_ba(o, rc):
    write_edge_list(generate_barabasi_albert(o["n"], o["m"], o["seed"]), o["out"])
    return EXIT_OK


COMMANDS = {
    "wl-run": _cmd_wl_run,
    "wl-distinguish": _cmd_wl_distinguish,
    "nwl-run": _cmd_nwl_run,
    "nwl-distinguish": _cmd_nwl_distinguish,
    "mpnn-run": _cmd_mpnn_run,
    "mpnn-distinguish": _cmd_mpnn_distinguish,
    "kmpnn-simulate": _cmd_kmpnn_simulate,
    "experiment-lottery": _cmd_experiment_lottery,
    "experiment-precision-sweep": _cmd_experiment_precision_sweep,
    "experiment-classes": _cmd_experiment_classes,
    "generate-er": _cmd_generate_er,
    "generate-ba": _cmd_generate_ba,
}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        rc = parse_cli(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(level=logging.INFO if rc.options.get("verbose") else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    from .korder import TupleBudgetError
    try:
        return COMMANDS[rc.subcommand](rc.options, rc)
    except (IngestionError, TupleBudgetError, OSError, ValueError) as exc:
        print(f"wlmpnn: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
