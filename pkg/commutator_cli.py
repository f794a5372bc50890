# commutator_cli.py
# python commutator_cli.py <command> [--in FILE] [--out FILE] [--tol T] [--seed S] ...

import argparse
import sys
from typing import List, Optional

from constants import DEFAULT_CLI_TOL, DEFAULT_REFINE, DEFAULT_SEED, LOG_FILE, LOG_LEVEL
from matcore.errors import InvalidInputError
from pipeline.orchestrator import EXIT_INVALID, configure_logging, error_document, execute
from pipeline.run_config import COMMANDS, RunConfig
from pipeline.serialization import dump_document, write_output


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        description="Commutator decompositions and obstruction certificates (JSON in, JSON out)."
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--in", dest="input_path", default=None,
                        help="Input JSON document (default: stdin)")
    parser.add_argument("--out", dest="output_path", default=None,
                        help="Output JSON document (default: stdout)")
    parser.add_argument("--tol", type=float, default=DEFAULT_CLI_TOL,
                        help=f"Residual tolerance, relative to max(1, ||a||) (default: {DEFAULT_CLI_TOL})")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED,
                        help="Unsigned 64-bit seed for random demo instances")
    parser.add_argument("--refine", type=int, default=DEFAULT_REFINE,
                        help="Barycentric refinements applied before decompose-field")
    parser.add_argument("--depth", type=int, default=None,
                        help="Iteration depth for fack-run (default: input or config)")
    parser.add_argument("--format", choices=("json",), default="json")
    parser.add_argument("--log-file", default=LOG_FILE,
                        help="Log file (default: stderr)")
    parser.add_argument("--log-level", default=LOG_LEVEL)
    return parser.parse_args(argv)


def main(argv: Optional[List[str]] = None) -> int:
    args = parse_args(argv)
    configure_logging(args.log_level, args.log_file)

    try:
        config = RunConfig(
            command=args.command,
            tol=args.tol,
            seed=args.seed,
            input_path=args.input_path,
            output_path=args.output_path,
            refine=args.refine,
            depth=args.depth,
            format=args.format,
        )
    except InvalidInputError as e:
        write_output(dump_document(error_document(e)), args.output_path)
        return EXIT_INVALID

    return execute(config)


if __name__ == "__main__":
    sys.exit(main())
