#!/usr/bin/env python3
import argparse
import json
import logging
import sys

import yaml

from cerberus import Validator
from prettytable import PrettyTable

from relzkp.bounds import (
    analytic_cheat_success,
    chsh_binary_quantum_value,
    chsh_classical_value,
    chsh_game_bound,
    chsh_parallel_coupled_upper,
    chsh_parallel_coupled_value,
    params_table,
    prior_work_rounds_as_printed,
    soundness_after_rounds,
)
from relzkp.errors import (
    ConfigError,
    GenerationFailed,
    InvalidColoring,
    InvalidGraph,
    InvalidParameter,
    NotAProver,
    RelzkpError,
    TooLargeToEnumerate,
)
from relzkp.field import PRESET_POLYNOMIALS, FieldSpec, find_low_weight_irreducible
from relzkp.graph import (
    ColoredGraph,
    calibrate_edge_prob,
    generate,
    triangle_graph,
)
from relzkp.protocol import CHEAT_PREFIX, HONEST_MODE, REJECT_REASONS, run_protocol, worker_count
from relzkp.rng import GRAPH_STREAM, SeededRng
from relzkp.spacetime import PROFILES, SpacetimeConfig, profile_schema
from relzkp.zksim import zk_test

# Set logging configuration
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_ERROR = 2

DEFAULT_FIELD_BITS = 112
# Widths whose classical CHSH value is enumerated by the bounds subcommand
CLASSICAL_MAX_BITS = 4
# GF(2), the answers of the binary CHSH game
BINARY_FIELD = FieldSpec(1, 0b11)

# Schema for the run configuration file
run_config_schema = {
    "graph": {"required": True, "type": "string", "empty": False},
    "field_preset": {
        "type": "integer",
        "allowed": list(PRESET_POLYNOMIALS),
        "excludes": "field",
    },
    "field": {
        "type": "dict",
        "excludes": "field_preset",
        "schema": {
            "width_bits": {"required": True, "type": "integer", "min": 2},
            "reduction_poly": {"required": True, "type": "string", "regex": "(0x)?[0-9a-fA-F]+"},
        },
    },
    "k": {"type": "integer", "min": 0, "excludes": "m", "required": True},
    "m": {"type": "integer", "min": 0, "excludes": "k", "required": True},
    "mode": {"type": "string", "regex": "(honest|cheat:[a-z_-]+)"},
    "profile": {"type": "string", "empty": False},
    "profile_overrides": {"type": "dict", "schema": profile_schema},
    "seed": {"required": True, "type": "integer", "min": 0},
    "transcript": {"type": "string", "nullable": True},
    "report": {"type": "string", "nullable": True},
    "session": {"type": "string", "nullable": True},
    "worst_case_timing": {"type": "boolean"},
    "workers": {"type": "integer", "min": 1},
}

# Schema for the extra spacetime profiles file
profile_file_schema = {
    "profiles": {
        "required": True,
        "type": "dict",
        "keysrules": {"type": "string", "empty": False},
        "valuesrules": {"type": "dict", "schema": profile_schema},
    }
}


def parse_epsilon(text):
    """Binding parameter from "2^-32", "2**-32" or a plain float"""
    text = text.strip()
    for sep in ("^", "**"):
        if sep in text:
            base, exponent = text.split(sep, 1)
            try:
                return float(base) ** float(exponent)
            except ValueError as e:
                raise argparse.ArgumentTypeError(f"Malformed binding parameter {text}") from e
    try:
        return float(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"Malformed binding parameter {text}") from e


def load_document(path, schema):
    """Load a JSON or YAML document and validate it

    Returns:
        the parsed document
    """
    try:
        with open(path, "r") as f:
            document = yaml.load(f, Loader=yaml.FullLoader)
    except (OSError, yaml.YAMLError) as e:
        raise ConfigError(f"Malformed configuration file {path}: {e}") from e

    validator = Validator()
    if not isinstance(document, dict) or not validator.validate(document, schema):
        errors = validator.errors if isinstance(document, dict) else "not a mapping"
        raise ConfigError(f"Invalid configuration file {path}. Error: {errors}")
    return document


def field_from_config(config):
    if "field" in config:
        return FieldSpec.from_config(config["field"])
    return FieldSpec.preset(config.get("field_preset", DEFAULT_FIELD_BITS))


def build_run_config(args):
    """Merge the configuration file with the command line flags

    Flags override file values; the merged document is validated against
    run_config_schema.
    """
    config = load_document(args.config, {**run_config_schema, **_relaxed()}) if args.config else {}
    flags = {
        "graph": args.graph,
        "k": args.k,
        "m": args.m,
        "mode": args.mode,
        "profile": args.profile,
        "seed": args.seed,
        "transcript": args.transcript,
        "report": args.report,
        "session": args.session,
        "workers": args.workers,
    }
    if args.field_bits is not None:
        config.pop("field", None)
        config.pop("field_preset", None)
        if args.field_poly is not None:
            config["field"] = {"width_bits": args.field_bits, "reduction_poly": args.field_poly}
        else:
            config["field_preset"] = args.field_bits
    if args.worst_case:
        config["worst_case_timing"] = True
    if flags["k"] is not None:
        config.pop("m", None)
    if flags["m"] is not None:
        config.pop("k", None)
    config.update({key: value for key, value in flags.items() if value is not None})

    validator = Validator()
    if not validator.validate(config, run_config_schema):
        raise ConfigError(f"Invalid run configuration. Error: {validator.errors}")
    return config


def _relaxed():
    # The file alone may leave out what the flags provide
    return {
        key: {**rules, "required": False}
        for key, rules in run_config_schema.items()
        if rules.get("required")
    }


def print_table(field_names, rows, title=None):
    table = PrettyTable()
    if title:
        table.title = title
    table.field_names = field_names
    for row in rows:
        table.add_row(row)
    print(table)


def cmd_gen_graph(args):
    if args.edges is not None:
        edge_prob = calibrate_edge_prob(args.vertices, args.edges)
        logger.info(f"Edge probability {edge_prob:.6f} for {args.edges} expected edges")
    else:
        edge_prob = args.edge_prob
    graph = generate(args.vertices, edge_prob, SeededRng(args.seed, GRAPH_STREAM))
    graph.save(args.out, include_witness=not args.public)
    logger.info(f"Graph with {graph.num_vertices} vertices and {graph.num_edges} edges saved to {args.out}")

    if args.json:
        print(json.dumps({"vertices": graph.num_vertices, "edges": graph.num_edges, "out": args.out}))
    return EXIT_OK


def cmd_params(args):
    rows = params_table(args.vertices, args.edges, args.k, args.epsilon_b)
    if args.json:
        print(json.dumps(rows, indent=2))
        return EXIT_OK

    print_table(
        ["k", "N", "m", "delta_s", "epsilon_b achieved", "MiB", "duration (s)", "prior rounds", "prior years"],
        [
            [
                row["k"],
                row["N"],
                row["m"],
                f"{row['delta_s']:.3e}",
                f"{row['achieved_epsilon_b']:.3e}",
                f"{row['resource_mib']:.2f}",
                f"{row['duration_s']:.4g}",
                f"{row['prior_work_rounds']:.3e}",
                f"{row['prior_work_years']:.3e}",
            ]
            for row in rows
        ],
        title=f"|V| = {args.vertices}, |E| = {args.edges}, epsilon_b = {args.epsilon_b:.3e}",
    )
    for width in sorted({row["N"] for row in rows}):
        poly = PRESET_POLYNOMIALS.get(width) or find_low_weight_irreducible(width)
        print(f"GF(2^{width}) reduction polynomial: {poly:#x}")
    for row in rows:
        logger.debug(
            f"k = {row['k']}: prior work rounds read as k*11*|E|^4 give "
            f"{prior_work_rounds_as_printed(row['k'], args.edges):.3e}"
        )
    return EXIT_OK


def load_profiles(path):
    if path is None:
        return None
    return load_document(path, profile_file_schema)["profiles"]


def _print_report(report):
    rows = [
        ["rounds", report.rounds],
        ["accepts", report.accepts],
    ]
    rows += [[f"rejects ({reason})", report.rejects_by_reason[reason]] for reason in REJECT_REASONS]
    rows += [
        ["verdict", "accept" if report.overall_accept else "reject"],
        ["first rejected round", report.first_reject_round],
        ["soundness bound", f"{report.soundness_bound:.3e}"],
        ["wall time (s)", f"{report.wall_time_ns / 1e9:.3f}"],
        ["audit violations", report.audit.get("violations", 0)],
    ]
    if report.analytic_cheat_success:
        rows.append(["quantum cheat bound", f"{report.analytic_cheat_success['overall']:.3e}"])
    for name, stats in report.timing.items():
        if stats:
            rows.append([f"{name} max / mean", f"{stats['max']:.2f} / {stats['mean']:.2f}"])
    print_table(["quantity", "value"], rows, title=f"mode {report.params['mode']}")


def cmd_run(args):
    config = build_run_config(args)
    graph = ColoredGraph.load(config["graph"])
    spec = field_from_config(config)
    spacetime = SpacetimeConfig.from_profile(
        config.get("profile", "deployment"),
        config.get("profile_overrides"),
        load_profiles(args.profile_file),
    )

    report = run_protocol(
        graph,
        spec,
        k=config.get("k"),
        m=config.get("m"),
        mode=config.get("mode", HONEST_MODE),
        spacetime_config=spacetime,
        seed=config["seed"],
        worst_case=config.get("worst_case_timing", False),
        transcript_path=config.get("transcript"),
        workers=config.get("workers", 1),
        progress=not args.quiet,
    )

    if config.get("report"):
        with open(config["report"], "w") as f:
            f.write(report.to_json())
    if config.get("session"):
        report.save_session(config["session"])
        logger.info(f"Session saved to {config['session']}")

    if args.json:
        print(report.to_json())
    else:
        _print_report(report)
    return EXIT_OK if report.overall_accept else EXIT_REJECTED


def cmd_attack(args):
    args.mode = CHEAT_PREFIX + args.strategy
    return cmd_run(args)


def cmd_zk_test(args):
    graph = ColoredGraph.load(args.graph) if args.graph else triangle_graph()
    spec = FieldSpec.preset(args.field_bits)
    report = zk_test(graph, spec, workers=worker_count(args.workers), progress=not args.quiet)

    if args.json:
        print(report.to_json())
    else:
        # Failing cases first
        shown = sorted(report.cases, key=lambda case: case.tv == 0)[: args.show]
        print_table(
            ["X", "C", "TV"],
            [[case.X, case.C, case.tv] for case in shown],
            title=f"{len(report.cases)} cases, max TV {report.max_tv}",
        )
        print("PASS" if report.passed else "FAIL")
    return EXIT_OK if report.passed else EXIT_REJECTED


def cmd_bounds(args):
    Q = 2**args.Q_bits
    if args.game == "chsh":
        spec = None
        if args.Q_bits in PRESET_POLYNOMIALS and args.Q_bits <= CLASSICAL_MAX_BITS:
            spec = FieldSpec.preset(args.Q_bits)
        values = chsh_game_bound(args.P, args.Q_bits, args.n, spec).to_dict()
    elif args.game == "coupled":
        values = {
            "game": "coupled",
            "P": args.P,
            "Q": Q,
            "n": args.n,
            "value": chsh_parallel_coupled_value(args.P, Q, args.n),
            "linearised_upper": chsh_parallel_coupled_upper(args.P, Q, args.n),
        }
    elif args.game == "binary":
        values = {
            "game": "binary",
            "quantum_value": chsh_binary_quantum_value(),
            "classical_value": chsh_classical_value(2, BINARY_FIELD),
        }
    else:
        if args.edges is None or args.rounds is None:
            raise InvalidParameter("The soundness table needs --edges and --rounds")
        values = {
            "game": "soundness",
            "edges": args.edges,
            "rounds": args.rounds,
            "delta_s": soundness_after_rounds(args.edges, args.rounds),
            **{
                f"quantum_{key}": value
                for key, value in analytic_cheat_success(args.edges, args.rounds, args.Q_bits, args.P).items()
            },
        }

    if args.json:
        print(json.dumps(values, indent=2))
    else:
        print_table(["quantity", "value"], [[key, value] for key, value in values.items()])
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="relzkp",
        description="Relativistic two-prover zero-knowledge proofs of graph 3-coloring",
    )
    parser.add_argument("--debug", help="Enable debug output", action="store_true", default=False)
    parser.add_argument("--quiet", help="Only print warnings and results", action="store_true", default=False)
    parser.add_argument("--json", help="Print machine readable JSON", action="store_true", default=False)
    subparsers = parser.add_subparsers(dest="command", required=True)

    gen = subparsers.add_parser("gen-graph", help="Generate a connected graph with a 3-coloring")
    gen.add_argument("--vertices", help="Number of vertices", type=int, required=True)
    density = gen.add_mutually_exclusive_group(required=True)
    density.add_argument("--edge-prob", help="Probability of a bichromatic edge", type=float)
    density.add_argument("--edges", help="Expected number of edges", type=int)
    gen.add_argument("--seed", help="Generator seed", type=int, required=True)
    gen.add_argument("--out", help="Output JSON file", type=str, required=True)
    gen.add_argument("--public", help="Do not store the witness", action="store_true", default=False)
    gen.set_defaults(func=cmd_gen_graph)

    params = subparsers.add_parser("params", help="Field width, rounds and resources")
    params.add_argument("--vertices", help="Number of vertices", type=int, required=True)
    params.add_argument("--edges", help="Number of edges", type=int, required=True)
    params.add_argument("--k", help="Soundness exponents", type=int, nargs="+", required=True)
    params.add_argument("--epsilon-b", help="Binding parameter, e.g. 2^-32", type=parse_epsilon, default=2.0**-32)
    params.set_defaults(func=cmd_params)

    for name, func, text in (
        ("run", cmd_run, "Run the protocol"),
        ("attack", cmd_attack, "Run the protocol with cheating provers"),
    ):
        run = subparsers.add_parser(name, help=text)
        run.add_argument("--config", help="JSON or YAML run configuration", type=str, default=None)
        run.add_argument("--graph", help="Graph JSON file", type=str, default=None)
        run.add_argument("--field-bits", help="Field width N", type=int, default=None)
        run.add_argument("--field-poly", help="Reduction polynomial in hex", type=str, default=None)
        rounds = run.add_mutually_exclusive_group()
        rounds.add_argument("--k", help="Soundness exponent, m = k|E|", type=int, default=None)
        rounds.add_argument("--m", help="Number of rounds", type=int, default=None)
        if name == "run":
            run.add_argument("--mode", help="honest or cheat:<strategy>", type=str, default=None)
        else:
            run.add_argument(
                "--strategy",
                help="Cheating strategy",
                choices=["one_bad_edge", "random_invalid", "relay", "equivocation"],
                required=True,
            )
        run.add_argument("--profile", help="Spacetime profile: " + ", ".join(PROFILES), type=str, default=None)
        run.add_argument("--profile-file", help="YAML file with extra profiles", type=str, default=None)
        run.add_argument("--seed", help="Run seed", type=int, default=None)
        run.add_argument("--transcript", help="JSON lines transcript output", type=str, default=None)
        run.add_argument("--report", help="JSON report output", type=str, default=None)
        run.add_argument("--session", help="Compressed session output", type=str, default=None)
        run.add_argument("--worst-case", help="Widen timing differences by 2 Delta", action="store_true", default=False)
        run.add_argument("--workers", help="Worker processes", type=int, default=None)
        run.set_defaults(func=func)

    zk = subparsers.add_parser("zk-test", help="Compare real and simulated views exhaustively")
    zk.add_argument("--graph", help="Graph JSON file with witness, the triangle by default", type=str, default=None)
    zk.add_argument("--field-bits", help="Preset field width N", type=int, default=3)
    zk.add_argument("--workers", help="Worker processes", type=int, default=1)
    zk.add_argument("--show", help="Failing cases to print", type=int, default=10)
    zk.set_defaults(func=cmd_zk_test)

    bounds = subparsers.add_parser("bounds", help="Non-local game and soundness bounds")
    bounds.add_argument(
        "--game", help="Bound to evaluate", choices=["chsh", "coupled", "binary", "soundness"], default="chsh"
    )
    bounds.add_argument("--P", help="Number of colors P", type=int, default=3)
    bounds.add_argument("--Q-bits", help="Field width, Q = 2^bits", type=int, default=DEFAULT_FIELD_BITS)
    bounds.add_argument("--n", help="Number of opened vertices", type=int, default=1)
    bounds.add_argument("--edges", help="Number of edges, for the soundness bound", type=int, default=None)
    bounds.add_argument("--rounds", help="Number of rounds, for the soundness bound", type=int, default=None)
    bounds.set_defaults(func=cmd_bounds)

    return parser


def main(argv=None):
    # Parse arguments
    parser = build_parser()
    args = parser.parse_args(argv)

    # Set logging system
    fmt = "%(msg)s"
    if args.debug:
        logging.basicConfig(level=logging.DEBUG, format=fmt)
    elif args.quiet:
        logging.basicConfig(level=logging.WARNING, format=fmt)
    else:
        logging.basicConfig(level=logging.INFO, format=fmt)

    try:
        return args.func(args)
    except (ConfigError, InvalidParameter, TooLargeToEnumerate, GenerationFailed) as e:
        logger.fatal(str(e))
        return EXIT_ERROR
    except (InvalidGraph, InvalidColoring, NotAProver) as e:
        logger.fatal(f"Unusable graph: {e}")
        return EXIT_ERROR
    except OSError as e:
        logger.fatal(f"I/O error: {e}")
        return EXIT_ERROR
    except RelzkpError as e:
        logger.fatal(f"Protocol error: {e}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
