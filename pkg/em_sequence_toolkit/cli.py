"""
emseq: generate the EM sequence, analyze a prefix and run the verifiers.

Reports go to standard output or the requested files; diagnostics go to
standard error. Exit status is 0 when every requested gate passes, 1 when a
gate fails and 2 on usage errors.
"""

import argparse
import json
import logging
import sys
from collections import OrderedDict

from dotenv import load_dotenv

from em_sequence_toolkit.errors import ConfigError, EMSequenceError, UsageError
from em_sequence_toolkit.evaluation.residuals import balance_report, growth_report
from em_sequence_toolkit.evaluation.suite import run_suite
from em_sequence_toolkit.evaluation.verdict import summary_df, suite_to_json, to_native
from em_sequence_toolkit.makedata.bit_io import (
    df_to_csv_text,
    load_or_generate,
    store_bits,
    store_df_csv,
    store_text,
    store_trace_csv,
)
from em_sequence_toolkit.makedata.config_parser import RunConfig, RunConfigParserTSV, resolve_config_path
from em_sequence_toolkit.models.index import SequenceIndex
from em_sequence_toolkit.models.rtree import build_rn, build_tn, rn_words_df, zeta_stats
from em_sequence_toolkit.models.sequence import ENGINES, generate
from em_sequence_toolkit.utils import write_atomic
from em_sequence_toolkit.visualization.tree_dot import export_dot

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"

# Extra bits generated past n so b+ lengths ending at n are not cut off.
ANALYSIS_MARGIN = 64

EXIT_OK = 0
EXIT_GATE_FAILED = 1
EXIT_USAGE = 2

DEFAULTS = RunConfig()


def _checkpoint_list(value):
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("checkpoints must be comma separated integers: {!r}".format(value))


def _add_common(subparser):

    subparser.add_argument("-n", type=int, default=None, help="prefix length (default {})".format(DEFAULTS.n))
    subparser.add_argument(
        "--engine",
        choices=sorted(ENGINES),
        default=None,
        help="generation engine (default {})".format(DEFAULTS.engine),
    )
    subparser.add_argument(
        "--force",
        action="store_true",
        default=None,
        help="allow the naive engine beyond {} bits".format(DEFAULTS.thresholds.naive_limit),
    )


def _add_checkpoints(subparser):

    subparser.add_argument(
        "--checkpoints",
        type=_checkpoint_list,
        default=None,
        help="comma separated prefix lengths (default {}; n is always added)".format(
            ",".join(str(c) for c in DEFAULTS.checkpoints)
        ),
    )


def build_parser():
    """
    Returns
    -------
    argparse.ArgumentParser
    """
    parser = argparse.ArgumentParser(prog="emseq", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--config", default=None, help="TSV config file (setting_name<TAB>value); or EMSEQ_CONFIG")
    parser.add_argument("--save-config", default=None, help="write the effective config to this TSV path")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")

    subparsers = parser.add_subparsers(dest="command")

    gen = subparsers.add_parser("gen", help="emit bits and the step trace")
    _add_common(gen)
    gen.add_argument(
        "--format",
        dest="output_format",
        choices=["text", "bin"],
        default=None,
        help="output format (default {})".format(DEFAULTS.output_format),
    )
    gen.add_argument("--out", default=None, help="output path (default standard output)")
    gen.add_argument("--trace", dest="trace_out", default=None, help="trace CSV path")

    stats = subparsers.add_parser("stats", help="occurrence counts, alpha(n) and word frequencies")
    _add_common(stats)
    stats.add_argument("--word", dest="words", action="append", default=None, help="word to count (repeatable)")
    stats.add_argument(
        "-l", dest="word_len", type=int, default=None, help="word length 1 or 2 (default {})".format(DEFAULTS.word_len)
    )
    _add_checkpoints(stats)
    stats.add_argument("--out", default=None, help="JSON report path")

    rn = subparsers.add_parser("rn", help="R_n summary")
    _add_common(rn)
    rn.add_argument("--words-out", default=None, help="CSV of R_n words with class and ending bit")
    rn.add_argument("--out", default=None, help="JSON summary path")

    tree = subparsers.add_parser("tree", help="T_n, DOT export and zeta statistics")
    _add_common(tree)
    tree.add_argument("--dot", default=None, help="DOT output path")
    tree.add_argument("--max-depth", type=int, default=None, help="drop vertices deeper than this in DOT")
    tree.add_argument(
        "--no-color", dest="color_balance", action="store_false", default=None, help="do not color by balance"
    )
    tree.add_argument("--stats-out", default=None, help="TreeStats JSON path (default standard output)")

    verify = subparsers.add_parser("verify", help="run the verification suite")
    _add_common(verify)
    verify.add_argument(
        "--lemma",
        default=None,
        help="all, none, or comma separated ids among 4.1,4.2,4.3,4.4,prop-4.1,proximity-triangle,"
        "first-two-complement (default {})".format(DEFAULTS.lemma),
    )
    verify.add_argument(
        "--maxlen", dest="max_word_len", type=int, default=None, help="max word length (default {})".format(
            DEFAULTS.max_word_len
        )
    )
    verify.add_argument(
        "--samples", type=int, default=None, help="proximity triples (default {})".format(DEFAULTS.samples)
    )
    verify.add_argument(
        "--seed", dest="rng_seed", type=int, default=None, help="sampling seed (default {})".format(DEFAULTS.rng_seed)
    )
    verify.add_argument("--residuals", dest="residuals", action="store_true", default=None, help="run residual checks")
    verify.add_argument(
        "--no-residuals", dest="residuals", action="store_false", default=None, help="skip residual checks"
    )
    _add_checkpoints(verify)
    verify.add_argument("--report", default=None, help="JSON report path (default standard output)")
    verify.add_argument("--summary", default=None, help="summary CSV path")
    verify.add_argument("--jobs", type=int, default=None, help="parallel checks (default {})".format(DEFAULTS.jobs))

    growth = subparsers.add_parser("growth", help="initial recurrences and matchlength growth")
    _add_common(growth)
    _add_checkpoints(growth)
    growth.add_argument("--report", default=None, help="JSON report path (default standard output)")

    return parser


def configure_logging(verbose=False):

    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO, format=LOG_FORMAT, stream=sys.stderr, force=True
    )


def resolve_run_config(args):
    """
    Defaults, then the config file, then explicit flags.

    Returns
    -------
    RunConfig
    """
    config = RunConfig()

    config_path = resolve_config_path(args.config)
    if config_path:
        config = RunConfigParserTSV(config_path).get_run_config(config)

    flags = {
        name: value
        for name, value in vars(args).items()
        if value is not None and name not in ("config", "save_config", "verbose")
    }
    config.update(flags)

    if config.command is None:
        raise UsageError("A subcommand is required")
    if config.n < 1:
        raise UsageError("n must be positive, got {}".format(config.n))
    if config.engine == "naive" and config.n > config.thresholds.naive_limit and not config.force:
        raise UsageError(
            "The naive engine is quadratic; n={} exceeds {} without --force".format(
                config.n, config.thresholds.naive_limit
            )
        )

    return config


def _emit(text, path):
    """
    Write text to path atomically, or to standard output.
    """
    if path:
        write_atomic(path, text)
    else:
        sys.stdout.write(text)


def _dump_json(payload):
    return json.dumps(to_native(payload), indent=2) + "\n"


def _analysis_index(config):
    """
    Index over n + ANALYSIS_MARGIN bits.
    """
    length = config.n + ANALYSIS_MARGIN
    if config.engine == "fast":
        seq = load_or_generate(length, max_bits=config.thresholds.max_bits)
    else:
        seq, _ = generate(length, engine=config.engine, max_bits=config.thresholds.max_bits)

    return SequenceIndex(seq)


def command_gen(config):

    seq, trace = generate(config.n, engine=config.engine, max_bits=config.thresholds.max_bits)

    if config.output_format == "text":
        if config.out:
            store_text(seq, config.out)
        else:
            store_text(seq, sys.stdout)
    else:
        if config.out:
            store_bits(seq, config.out)
        else:
            sys.stdout.buffer.write(store_bits(seq))
            sys.stdout.flush()

    if config.trace_out:
        store_trace_csv(trace, config.trace_out)

    return EXIT_OK


def command_stats(config):

    index = _analysis_index(config)
    n = config.n

    report = balance_report(index, config.word_len, config.effective_checkpoints(), config.thresholds)

    payload = OrderedDict()
    payload["n"] = n
    payload["alpha"] = index.alpha(n)
    payload["counts"] = OrderedDict((word, index.count_occurrences(word, 1, n)) for word in config.words)
    payload["balance"] = report.to_dict()

    _emit(_dump_json(payload), config.out)

    return EXIT_OK if report.passed else EXIT_GATE_FAILED


def command_rn(config):

    index = _analysis_index(config)
    rn = build_rn(index, config.n)

    payload = OrderedDict(
        [
            ("n", rn.n),
            ("rn_size", len(rn)),
            ("alpha", rn.alpha),
            ("x", rn.x),
            ("identity_holds", rn.identity_holds),
            ("ending_counts", OrderedDict((str(k), v) for k, v in rn.ending_counts().items())),
            ("bad_word_count", rn.bad_word_count),
            ("max_word_length", rn.max_length),
        ]
    )
    _emit(_dump_json(payload), config.out)

    if config.words_out:
        store_df_csv(rn_words_df(index, rn), config.words_out)

    return EXIT_GATE_FAILED if rn.identity_holds is False else EXIT_OK


def command_tree(config):

    index = _analysis_index(config)
    tree = build_tn(build_rn(index, config.n))
    stats = zeta_stats(tree)

    if config.dot:
        write_atomic(config.dot, export_dot(tree, color_balance=config.color_balance, max_depth=config.max_depth))

    _emit(stats.to_json(), config.stats_out)

    return EXIT_OK if stats.gamma_identity_holds() else EXIT_GATE_FAILED


def command_verify(config):

    index = _analysis_index(config)
    reports = run_suite(index.seq, config, index=index)

    _emit(suite_to_json(reports, config), config.report)
    if config.summary:
        write_atomic(config.summary, df_to_csv_text(summary_df(reports)))

    failed = [report.check_id for report in reports if not report.passed]
    if failed:
        logger.error("Failed checks: %s", ", ".join(failed))
        return EXIT_GATE_FAILED

    return EXIT_OK


def command_growth(config):

    index = _analysis_index(config)
    report = growth_report(index, config.effective_checkpoints(), config.thresholds, n=config.n)

    _emit(report.to_json(), config.report)

    return EXIT_OK if report.passed else EXIT_GATE_FAILED


COMMANDS = {
    "gen": command_gen,
    "stats": command_stats,
    "rn": command_rn,
    "tree": command_tree,
    "verify": command_verify,
    "growth": command_growth,
}


def run(argv=None):
    """
    Run one subcommand.

    Parameters
    ----------
    argv: list
        Arguments without the program name, defaults to sys.argv[1:]

    Returns
    -------
    int
        Exit code
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    configure_logging(args.verbose)
    load_dotenv()

    try:
        config = resolve_run_config(args)
        if args.save_config:
            write_atomic(args.save_config, config.to_tsv())
        return COMMANDS[config.command](config)
    except (UsageError, ConfigError) as e:
        logger.error("%s", e)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except (EMSequenceError, ValueError) as e:
        logger.error("%s", e)
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
