"""CSV and SVG artifacts derived from an :class:`EvalReport`.

CSV files are the canonical output; SVG plots are rendered from the same
counts. Both are byte-stable for a given report.
"""

from __future__ import annotations

import csv
import io
import logging
from pathlib import Path
from typing import Iterable, Sequence

import matplotlib
from matplotlib.figure import Figure

from ..utils import PathLike, resolve_path, write_bytes_atomic, write_text_atomic
from .exceptions import ReportWriteError
from .report import METHODS, EvalReport

LOGGER = logging.getLogger("sicunet.evaluation")

BER_FLOOR = 1e-6

METHOD_TITLES = {"full": "Full SICU-Net", "sic": "SIC only", "unet": "U-Net only"}

_SVG_RC = {"svg.hashsalt": "sicunet-report", "svg.fonttype": "path", "path.simplify": False}


def _csv_text(header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _fmt(value: float) -> str:
    return format(value, ".10g")


def _write(path: Path, text: str) -> Path:
    try:
        return write_text_atomic(path, text)
    except OSError as exc:
        raise ReportWriteError(path, f"Unable to write report file: {exc}") from exc


def accuracy_csv(report: EvalReport) -> str:
    rows = []
    for stage, matrix in report.confusion.items():
        tally = matrix.tally()
        rows.append((stage, tally.correct, tally.total, _fmt(tally.accuracy)))
    if "sir" in report.confusion:
        tally = report.sir_within_one_bin()
        rows.append(("sir_within_1", tally.correct, tally.total, _fmt(tally.accuracy)))
    return _csv_text(("stage", "correct", "total", "accuracy"), rows)


def confusion_csv(report: EvalReport, stage: str) -> str:
    matrix = report.confusion[stage]
    rows = (
        (matrix.labels[label], matrix.labels[pred], int(matrix.counts[label, pred]))
        for label in range(matrix.num_classes)
        for pred in range(matrix.num_classes)
    )
    return _csv_text(("label", "pred", "count"), rows)


def precision_recall_csv(report: EvalReport, stage: str) -> str:
    rows = (
        (score.label, _fmt(score.precision), _fmt(score.recall), score.support)
        for score in report.confusion[stage].class_scores()
    )
    return _csv_text(("label", "precision", "recall", "support"), rows)


def ber_csv(report: EvalReport, method: str) -> str:
    """Populated bins only; ``floored`` marks bins with zero errors, plotted at :data:`BER_FLOOR`."""

    rows = (
        (method, sps, sir, count.bits, count.errors, _fmt(count.rate), int(count.errors == 0))
        for sps, sir, count in report.curves[method].rows()
    )
    return _csv_text(("method", "sps", "sir_bin_db", "bits", "errors", "ber", "floored"), rows)


def stage_accuracy_by_sir_csv(report: EvalReport) -> str:
    rows = (
        (stage, sir, tally.correct, tally.total, _fmt(tally.accuracy))
        for stage, per_bin in report.accuracy_by_sir.items()
        for sir, tally in sorted(per_bin.items())
        if tally.total
    )
    return _csv_text(("stage", "sir_bin_db", "correct", "total", "accuracy"), rows)


def method_share_csv(report: EvalReport) -> str:
    items = sorted(report.method_share.items(), key=lambda item: (-item[0][0], item[0][1]))
    return _csv_text(("sps", "sir_bin_db", "sic", "sicunet"), ((sps, sir, s.sic, s.sicunet) for (sps, sir), s in items))


def _svg_bytes(figure: Figure) -> bytes:
    buffer = io.BytesIO()
    with matplotlib.rc_context(_SVG_RC):
        figure.savefig(buffer, format="svg", metadata={"Date": None, "Creator": None})
    return buffer.getvalue()


def ber_figure(report: EvalReport, sps: int) -> Figure:
    """BER against SIR for every method at one interferer sps, on a log axis."""

    figure = Figure(figsize=(6.0, 4.0))
    axes = figure.add_subplot()
    for method in METHODS:
        curve = report.curves.get(method)
        if curve is None:
            continue
        bins = curve.bins(sps)
        if not bins:
            continue
        rates = [max(curve.counts[(sps, sir)].rate, BER_FLOOR) for sir in bins]
        axes.semilogy(bins, rates, marker="o", label=METHOD_TITLES.get(method, method))
    axes.set_xlabel("SIR (dB)")
    axes.set_ylabel("BER")
    axes.set_title(f"Interferer sps = {sps}")
    axes.set_ylim(BER_FLOOR / 2, 1.0)
    axes.grid(True, which="both", linewidth=0.3)
    axes.legend(loc="lower left")
    return figure


def stage_accuracy_figure(report: EvalReport) -> Figure:
    figure = Figure(figsize=(6.0, 4.0))
    axes = figure.add_subplot()
    for stage, per_bin in report.accuracy_by_sir.items():
        bins = [sir for sir, tally in sorted(per_bin.items()) if tally.total]
        axes.plot(bins, [per_bin[sir].accuracy for sir in bins], marker="o", label=f"{stage} stage")
    axes.set_xlabel("SIR (dB)")
    axes.set_ylabel("Accuracy")
    axes.set_ylim(0.0, 1.05)
    axes.grid(True, linewidth=0.3)
    axes.legend(loc="lower right")
    return figure


def emit_report(report: EvalReport, out_dir: PathLike) -> list[Path]:
    """Write every CSV and SVG artifact of ``report`` into ``out_dir``.

    Raises:
        ReportWriteError: If the directory or a file cannot be written.
    """

    directory = resolve_path(out_dir)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ReportWriteError(directory, f"Unable to create report directory: {exc}") from exc

    written = [_write(directory / "accuracy.csv", accuracy_csv(report))]
    for stage in report.confusion:
        written.append(_write(directory / f"confusion_{stage}.csv", confusion_csv(report, stage)))
        written.append(_write(directory / f"precision_recall_{stage}.csv", precision_recall_csv(report, stage)))
    for method in report.curves:
        written.append(_write(directory / f"ber_{method}.csv", ber_csv(report, method)))
    written.append(_write(directory / "stage_accuracy_by_sir.csv", stage_accuracy_by_sir_csv(report)))
    written.append(_write(directory / "method_share.csv", method_share_csv(report)))

    sps_values = sorted({sps for curve in report.curves.values() for sps in curve.sps_values()}, reverse=True)
    figures = [(f"ber_sps{sps}.svg", ber_figure(report, sps)) for sps in sps_values]
    if report.accuracy_by_sir:
        figures.append(("stage_accuracy_by_sir.svg", stage_accuracy_figure(report)))
    for name, figure in figures:
        path = directory / name
        try:
            written.append(write_bytes_atomic(path, _svg_bytes(figure)))
        except OSError as exc:
            raise ReportWriteError(path, f"Unable to write plot: {exc}") from exc

    LOGGER.info("Emitted %d report files to %s", len(written), directory)
    return written
