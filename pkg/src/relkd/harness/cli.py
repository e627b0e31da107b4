"""
Command-line entry point: relkd <verb> --config PATH --out DIR [...]

Exit codes: 0 success, 2 configuration error, 3 training aborted.
"""

import argparse
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

from dotenv import load_dotenv

from relkd.exceptions import ConfigurationError, RelkdError, TrainingAbortedError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ABORT = 3
EXIT_ERROR = 1

VERBS = ("validate", "pretrain", "train", "sweep-k", "ablate", "dump-embeddings", "report")


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="relkd", description="Relation distillation for noisy-label learning")
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in VERBS:
        p = sub.add_parser(verb)
        p.add_argument("--config", type=Path, default=Path("relkd.yaml"), help="YAML experiment config")
        p.add_argument("--out", type=Path, default=None, help="Output directory (overrides experiment.output_dir)")
        p.add_argument("--seeds", type=_int_list, default=None, help="Comma-separated seeds")
        p.add_argument("--threads", type=int, default=None, help="Parallel (config, seed) workers")
        p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                       help="Dotted config override, repeatable")
        p.add_argument("--verbose", action="store_true")
        if verb == "sweep-k":
            p.add_argument("--k", type=_float_list, required=True, help="Comma-separated K values")
        if verb == "ablate":
            p.add_argument("--degraded-k", type=float, default=5.0)
        if verb == "dump-embeddings":
            p.add_argument("--checkpoint", type=Path, default=None, help="Task or SSL checkpoint")
            p.add_argument("--channel", choices=("student", "teacher"), default="student",
                           help="Which saved encoder to embed with when --checkpoint is omitted")
            p.add_argument("--classes", type=_int_list, default=None, help="Only these clean classes")
            p.add_argument("--split", choices=("train", "test"), default="train")
        if verb == "report":
            p.add_argument("--results", type=Path, nargs="*", default=None, help="results.csv files")
    return parser


def _threads(args: argparse.Namespace) -> int | None:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("RELKD_THREADS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigurationError(f"RELKD_THREADS must be an integer, got '{env}'")
    return None


def _load(args: argparse.Namespace):
    from relkd.config import load_experiment

    cfg = load_experiment(args.config, args.overrides)
    changes = {}
    if args.out is not None:
        changes["output_dir"] = str(args.out)
    if args.seeds:
        changes["seeds"] = args.seeds
    threads = _threads(args)
    if threads is not None:
        changes["threads"] = threads
    return replace(cfg, **changes) if changes else cfg


def run(args: argparse.Namespace) -> int:
    """Dispatch a parsed command; exceptions propagate to main()."""
    from relkd.runner import RelkdRunner

    if args.verb == "report":
        from relkd.harness.report import report

        out = args.out or Path("runs")
        paths = args.results or sorted(out.rglob("results.csv"))
        if not paths:
            raise ConfigurationError(f"No results.csv files found under {out}", key="--results")
        grid = report(paths, out)
        print(grid.to_string())
        return EXIT_OK

    cfg = _load(args)
    runner = RelkdRunner(cfg)

    if args.verb == "validate":
        print(f"Configuration '{cfg.config_id}' is valid ({len(cfg.seeds)} seeds)")
    elif args.verb == "pretrain":
        for path in runner.pretrain():
            print(path)
    elif args.verb == "train":
        for row in runner.run_experiment():
            print(f"{row.config_id}\tseed={row.seed}\ttest_acc={row.test_accuracy:.4f}")
    elif args.verb == "sweep-k":
        result = runner.sweep_k(args.k)
        print(result.table.to_string())
    elif args.verb == "ablate":
        from relkd.harness.report import noise_grid

        rows = runner.ablate(degraded_k=args.degraded_k)
        for row in rows:
            print(f"{row.config_id}\tseed={row.seed}\ttest_acc={row.test_accuracy:.4f}")
        print(noise_grid(rows).to_string())
    elif args.verb == "dump-embeddings":
        from relkd.harness.embeddings import dump_embeddings
        from relkd.training.checkpoint import load_checkpoint

        seed = cfg.seeds[0]
        default_name = "task.npz" if args.channel == "student" else "teacher.npz"
        checkpoint = args.checkpoint or runner.run_dir(cfg, seed) / default_name
        model = load_checkpoint(checkpoint)
        data = runner.load_data(cfg, seed)
        ds = data.train if args.split == "train" else data.test
        path = Path(cfg.output_dir) / cfg.config_id / f"embeddings_{args.channel}_{args.split}_seed{seed}.csv"
        print(dump_embeddings(model, ds, path, classes=args.classes))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        datefmt="%H:%M:%S",
    )
    try:
        return run(args)
    except ConfigurationError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except TrainingAbortedError as e:
        logger.error(f"Training aborted: {e}")
        return EXIT_ABORT
    except RelkdError as e:
        logger.error(f"{args.verb} failed: {e}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
