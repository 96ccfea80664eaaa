"""
Command-line entry point.

    gramdisp count CORPUS GOLD      -> counts.tsv + counts.meta.json
    gramdisp score COUNTS           -> scores.tsv
    gramdisp evaluate SCORES GOLD   -> report.tsv + report.json
    gramdisp run CORPUS GOLD        -> all of the above
    gramdisp history                -> runs stored in the ledger
    gramdisp history --show ID      -> full report of one stored run

Settings resolve as: defaults < --config file < GRAMDISP_* environment < flags.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

from gramdisp.config import RunConfig, resolve_config
from gramdisp.cooc import count_corpus, read_counts, write_counts
from gramdisp.crud import EvaluationRunCreate, create_run, get_report, get_runs
from gramdisp.database import get_db
from gramdisp.errors import GramDispError
from gramdisp.evalreport import (
    COUNTS_FILE,
    REPORT_JSON,
    REPORT_TSV,
    SCORES_FILE,
    EvalReport,
    evaluate_scores,
    run_pipeline,
    write_report,
)
from gramdisp.measures import score_table, write_scores
from gramdisp.targets import build_lexicon, read_goldset

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INPUT = 2


def _default(name: str) -> str:
    field = RunConfig.model_fields[name]
    value = field.default_factory() if field.default_factory is not None else field.default
    if isinstance(value, tuple):
        return ",".join(value)
    if isinstance(value, bool):
        return str(value).lower()
    return "none" if value is None else str(value)


def _help(name: str, extra: str = "") -> str:
    description = RunConfig.model_fields[name].description or ""
    return f"{description}{extra} (default: {_default(name)})"


def _add_settings(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("settings")
    group.add_argument("--config", type=Path, default=None, help="key=value config file (default: none)")
    group.add_argument("--window", type=int, help=_help("window"))
    group.add_argument("--min-count", type=int, help=_help("min_count"))
    group.add_argument("--stop-pos", help=_help("stop_pos", ", comma-separated, 'none' for no deletion"))
    group.add_argument("--log-base", type=float, help=_help("log_base"))
    group.add_argument("--match-field", choices=["surface", "lemma"], help=_help("match_field"))
    group.add_argument("--case-fold", action=argparse.BooleanOptionalAction, default=None, help=_help("case_fold"))
    group.add_argument(
        "--longest-match", action=argparse.BooleanOptionalAction, default=None, help=_help("longest_match")
    )
    group.add_argument("--allowed-pos", help=_help("allowed_pos", ", comma-separated"))
    group.add_argument(
        "--include-missing", action=argparse.BooleanOptionalAction, default=None, help=_help("include_missing")
    )
    group.add_argument(
        "--count-unfiltered", action=argparse.BooleanOptionalAction, default=None, help=_help("count_unfiltered")
    )
    group.add_argument("--ap-ties", choices=["id", "expected"], help=_help("ap_ties"))
    group.add_argument("--output-dir", type=Path, help=_help("output_dir"))
    group.add_argument("--threads", type=int, help=_help("threads", "; output bytes do not depend on it"))
    group.add_argument("--batch-size", type=int, help=_help("batch_size"))
    group.add_argument("--progress", action=argparse.BooleanOptionalAction, default=None, help=_help("progress"))
    group.add_argument("--ledger", dest="ledger_url", help=_help("ledger_url"))
    group.add_argument(
        "--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging verbosity on standard error (default: WARNING)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gramdisp",
        description="Contextual-dispersion scores for German prepositions and their evaluation "
                    "against graded gold labels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="Count window co-occurrences of the gold targets")
    p.add_argument("corpus", type=Path, help="Vertical corpus (surface<TAB>lemma<TAB>pos)")
    p.add_argument("gold", type=Path, help="Gold set (form<TAB>degree)")
    _add_settings(p)

    p = sub.add_parser("score", help="Compute entropy, frequency and context types from counts")
    p.add_argument("counts", type=Path, help=f"{COUNTS_FILE} written by 'count'")
    _add_settings(p)

    p = sub.add_parser("evaluate", help="Evaluate scores against the gold set")
    p.add_argument("scores", type=Path, help=f"{SCORES_FILE} written by 'score'")
    p.add_argument("gold", type=Path, help="Gold set (form<TAB>degree)")
    _add_settings(p)

    p = sub.add_parser("run", help="count, score and evaluate in one go")
    p.add_argument("corpus", type=Path, help="Vertical corpus (surface<TAB>lemma<TAB>pos)")
    p.add_argument("gold", type=Path, help="Gold set (form<TAB>degree)")
    _add_settings(p)

    p = sub.add_parser("history", help="List runs stored in the ledger")
    p.add_argument("--fingerprint", default=None, help="Only runs under this config fingerprint (default: all)")
    p.add_argument("--limit", type=int, default=20, help="Number of runs to list (default: 20)")
    p.add_argument(
        "--show", type=int, default=None, metavar="ID", help="Print the full JSON report of one run (default: list runs)"
    )
    _add_settings(p)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    overrides: Dict[str, Any] = {
        name: getattr(args, name, None)
        for name in RunConfig.model_fields
        if getattr(args, name, None) is not None
    }
    return resolve_config(args.config, overrides)


def _require(*paths: Path) -> None:
    for path in paths:
        if not path.is_file():
            raise FileNotFoundError(f"No such file: {path}")


def _record(report: EvalReport, config: RunConfig) -> None:
    if not config.ledger_url:
        return
    with get_db(config.ledger_url) as db:
        create_run(db, EvaluationRunCreate.from_report(report))


def cmd_count(args: argparse.Namespace, config: RunConfig) -> None:
    _require(args.corpus, args.gold)
    lexicon = build_lexicon(read_goldset(args.gold), config)
    table = count_corpus(args.corpus, lexicon, config)
    path = write_counts(table, Path(config.output_dir) / COUNTS_FILE, config)
    logger.info("Wrote %s", path)


def cmd_score(args: argparse.Namespace, config: RunConfig) -> None:
    _require(args.counts)
    table = read_counts(args.counts, config)
    path = write_scores(
        score_table(table, config.log_base), Path(config.output_dir) / SCORES_FILE, config, table.corpus_digest
    )
    logger.info("Wrote %s", path)


def cmd_evaluate(args: argparse.Namespace, config: RunConfig) -> None:
    _require(args.scores, args.gold)
    _, report = evaluate_scores(args.scores, read_goldset(args.gold), config)
    write_report(report, config.output_dir, config)
    _record(report, config)


def cmd_run(args: argparse.Namespace, config: RunConfig) -> None:
    _require(args.corpus, args.gold)
    _, report = run_pipeline(args.corpus, args.gold, config)
    _record(report, config)
    logger.info("Wrote %s and %s", Path(config.output_dir) / REPORT_TSV, Path(config.output_dir) / REPORT_JSON)


def cmd_history(args: argparse.Namespace, config: RunConfig) -> None:
    if not config.ledger_url:
        raise GramDispError("No ledger configured; pass --ledger or set GRAMDISP_LEDGER_URL")
    with get_db(config.ledger_url) as db:
        if args.show is not None:
            report = get_report(db, args.show)
            if report is None:
                raise GramDispError(f"No run with id {args.show} in the ledger")
            print(report.model_dump_json(indent=2))
            return
        runs = get_runs(db, fingerprint=args.fingerprint, limit=args.limit)
    print("id\ttimestamp\tfingerprint\tn\trho_entropy\trho_frequency\trho_types")
    for run in runs:
        rhos = [f"{r:.6f}" if r is not None else "NA" for r in (run.rho_entropy, run.rho_frequency, run.rho_types)]
        print("\t".join([str(run.id), run.timestamp.isoformat(), run.fingerprint[:12], str(run.n), *rhos]))


COMMANDS = {
    "count": cmd_count,
    "score": cmd_score,
    "evaluate": cmd_evaluate,
    "run": cmd_run,
    "history": cmd_history,
}


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    try:
        config = config_from_args(args)
        COMMANDS[args.command](args, config)
    except FileNotFoundError as e:
        missing = e.filename if e.filename else str(e).removeprefix("No such file: ")
        print(f"gramdisp: error: input not found: {missing}", file=sys.stderr)
        return EXIT_INPUT
    except GramDispError as e:
        print(f"gramdisp: error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as e:
        print(f"gramdisp: error: {e}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
