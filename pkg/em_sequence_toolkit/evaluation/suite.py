"""
The verification suite: independent checks over one frozen prefix, run in
process or as parallel VerificationRun processes, merged by check id.
"""

import logging
import multiprocessing
import queue
from collections import OrderedDict

from em_sequence_toolkit.errors import CheckError
from em_sequence_toolkit.evaluation import lemmas, residuals
from em_sequence_toolkit.evaluation.verdict import VerdictReport, merge_reports
from em_sequence_toolkit.models.index import SequenceIndex
from em_sequence_toolkit.utils import timing

logger = logging.getLogger(__name__)

LEMMA_IDS = ("4.1", "4.2", "4.3", "4.4")

QUEUE_POLL_SECONDS = 1.0


def _lemma_check(lemma_id):
    def run(index, config):
        return lemmas.scan_lemma(index, lemma_id, config.max_word_len, config.n)

    return run


def _theorem1_check(word_len):
    def run(index, config):
        return residuals.theorem1_residuals(index, word_len, config.effective_checkpoints(), config.thresholds)

    return run


def _balance_check(word_len):
    def run(index, config):
        return residuals.balance_report(index, word_len, config.effective_checkpoints(), config.thresholds)

    return run


CHECKS = OrderedDict(
    [("lemma-{}".format(lemma_id), _lemma_check(lemma_id)) for lemma_id in LEMMA_IDS]
    + [
        ("prop-4.1", lambda index, config: lemmas.check_prop41(index, config.max_word_len, config.n)),
        (
            "proximity-triangle",
            lambda index, config: lemmas.check_proximity_triangle(
                index, config.samples, config.rng_seed, n=config.n
            ),
        ),
        (
            "first-two-complement",
            lambda index, config: lemmas.check_first_two_complement(index, config.max_word_len, config.n),
        ),
    ]
)

RESIDUAL_CHECKS = OrderedDict(
    [
        (
            "prop-3.1",
            lambda index, config: residuals.prop31_residuals(
                index, config.effective_checkpoints(), config.thresholds
            ),
        ),
        ("theorem-1-l1", _theorem1_check(1)),
        ("theorem-1-l2", _theorem1_check(2)),
        ("balance-l1", _balance_check(1)),
        ("balance-l2", _balance_check(2)),
        (
            "growth",
            lambda index, config: residuals.growth_report(
                index, config.effective_checkpoints(), config.thresholds, n=config.n
            ),
        ),
        (
            "corollary-4.1",
            lambda index, config: residuals.corollary41_report(
                index, config.effective_checkpoints(), config.thresholds
            ),
        ),
        (
            "zeta",
            lambda index, config: residuals.zeta_report(index, config.effective_checkpoints(), config.thresholds),
        ),
    ]
)


def select_checks(config):
    """
    Check ids requested by a run configuration.

    Returns
    -------
    list
    """
    if config.lemma == "all":
        selected = list(CHECKS)
    elif config.lemma == "none":
        selected = []
    else:
        selected = []
        for lemma_id in config.lemma.split(","):
            check_id = lemma_id if lemma_id in CHECKS else "lemma-{}".format(lemma_id)
            if check_id not in CHECKS:
                raise ValueError("Unknown check {!r}".format(lemma_id))
            selected.append(check_id)

    if config.residuals:
        selected.extend(RESIDUAL_CHECKS)

    return selected


def run_check(check_id, index, config):
    """
    Run one check by id.

    Returns
    -------
    VerdictReport
    """
    check = CHECKS.get(check_id) or RESIDUAL_CHECKS.get(check_id)
    if check is None:
        raise ValueError("Unknown check {!r}".format(check_id))

    report = check(index, config)
    logger.info("%s", report)

    return report


class VerificationRun(multiprocessing.Process):
    """
    One check over a sequence. Runs in the calling process via run(), or as
    a child process that puts its report, or the error it raised, on a queue.
    """

    def __init__(self, check_id, seq, config, multiprocess=False, index=None):

        # To enable multiprocessing
        super().__init__()
        self.multiprocess = multiprocess
        self.queue = multiprocessing.Queue() if multiprocess else None

        self.check_id = check_id
        self.seq = seq
        self.config = config
        self.index = index
        self.report = None

    def _run_check(self):

        index = self.index if self.index is not None else SequenceIndex(self.seq)
        self.report = run_check(self.check_id, index, self.config)

        return self.report

    def run(self):
        """
        Run the check until it's finished.
        """
        if not self.multiprocess:
            return self._run_check()

        try:
            self._run_check()
        except Exception as e:
            logger.error("%s raised %s: %s", self.check_id, type(e).__name__, e)
            self.queue.put({"error": type(e).__name__, "message": str(e)})
        else:
            self.queue.put({"report": self.report.to_dict()})

        return self.report

    def _wait_for_payload(self):

        if self.exitcode is None and not self.is_alive():
            raise CheckError("{} was never started".format(self.check_id))

        while self.exitcode is None:
            try:
                return self.queue.get(timeout=QUEUE_POLL_SECONDS)
            except queue.Empty:
                continue

        # The child may have flushed its payload just before exiting.
        try:
            return self.queue.get(timeout=QUEUE_POLL_SECONDS)
        except queue.Empty:
            raise CheckError("{} exited with code {} without a report".format(self.check_id, self.exitcode))

    def get_report(self):
        """
        The report of a finished run; waits on the queue for child processes.

        Returns
        -------
        VerdictReport

        Raises
        ------
        CheckError
            The child raised, or exited without a report
        """
        if self.report is None and self.multiprocess:
            payload = self._wait_for_payload()
            if "error" in payload:
                raise CheckError(
                    "{} failed in a child process: {}: {}".format(self.check_id, payload["error"], payload["message"])
                )
            self.report = VerdictReport.from_dict(payload["report"])

        return self.report


@timing
def run_suite(seq, config, index=None):
    """
    Run every check the configuration selects and merge the reports.

    Parameters
    ----------
    seq: BitSequence
        At least config.n bits

    config: RunConfig

    index: SequenceIndex
        Reused when given and checks run in process

    Returns
    -------
    list
        VerdictReport objects in check id order
    """
    check_ids = select_checks(config)
    jobs = max(1, int(config.jobs))

    if jobs == 1:
        index = index if index is not None else SequenceIndex(seq)
        reports = [VerificationRun(check_id, seq, config, index=index).run() for check_id in check_ids]
        return merge_reports(reports)

    reports = []
    for batch_start in range(0, len(check_ids), jobs):
        batch = [
            VerificationRun(check_id, seq, config, multiprocess=True)
            for check_id in check_ids[batch_start : batch_start + jobs]
        ]
        for run in batch:
            run.start()
        try:
            for run in batch:
                # Drain the queue before joining.
                reports.append(run.get_report())
                run.join()
        finally:
            for run in batch:
                if run.is_alive():
                    run.terminate()
                run.join()

    return merge_reports(reports)
