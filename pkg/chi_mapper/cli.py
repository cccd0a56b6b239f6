import logging
from pathlib import Path
from typing import Optional

import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape

from chi_mapper.errors import InfeasibleSummaryError
from chi_mapper.io_utils import STDIO, dumps_json
from chi_mapper.noise import process_fidelity_bounds
from chi_mapper.oracle import load_process
from chi_mapper.pipeline import MODEL_CHOICES, AnalysisConfig, Analyzer, SimulateConfig, Simulator
from chi_mapper.report import format_bounds, render_json, render_markdown
from chi_mapper.tables import DEFAULT_ROW_TOLERANCE, STRICT_ROW_TOLERANCE, load_tables, summarize

app = typer.Typer(add_completion=False, help="Characterize a noisy gate from its Z-basis and X-basis error tables.")
err = Console(stderr=True)
log = logging.getLogger("chi_mapper")

EXIT_INVALID = 1
EXIT_INFEASIBLE = 2


@app.callback()
def main(verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging on stderr")):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=err, show_path=False)],
        force=True,
    )


def _fail(e: Exception, code: int = EXIT_INVALID):
    err.print(f"[red]error:[/red] {escape(str(e))}", markup=True, highlight=False)
    raise typer.Exit(code)


def _emit(text: str, out: Optional[Path]):
    if out is None or str(out) == STDIO:
        typer.echo(text)
        return
    out.write_text(text + "\n", encoding="utf-8")
    err.print(f"Saved → {out}")


@app.command()
def analyze(
    input_path: str = typer.Option(..., "--input", "-i", help="Error-table JSON ('-' for stdin)"),
    targets: Path = typer.Option(None, help="JSON file with custom targets {name, paulis[]}"),
    chi: Path = typer.Option(None, "--chi", help="Optional DiagonalChi JSON evaluated as a custom model"),
    model: str = typer.Option("both", help="worst-case|statistical|both"),
    rounded_summaries: bool = typer.Option(False, help="Round summaries to 3 decimals before modelling"),
    strict: bool = typer.Option(False, help=f"Row sums must equal 1 within {STRICT_ROW_TOLERANCE:g}"),
    row_tolerance: float = typer.Option(DEFAULT_ROW_TOLERANCE, help="Accepted row-sum deviation"),
    fmt: str = typer.Option("md", "--format", help="md|json"),
    out: Path = typer.Option(None, "--out", "-o", help="Write the report here instead of stdout"),
):
    """Summaries, bounds, both noise models and target fidelities."""
    if model not in MODEL_CHOICES:
        _fail(ValueError(f"--model must be one of {'|'.join(MODEL_CHOICES)}, got {model!r}"))
    if fmt not in ("md", "json"):
        _fail(ValueError(f"--format must be md or json, got {fmt!r}"))
    cfg = AnalysisConfig(
        row_tolerance=row_tolerance,
        strict=strict,
        rounded_summaries=rounded_summaries,
        model=model,
        targets_path=str(targets) if targets else None,
        chi_path=str(chi) if chi else None,
    )
    log.debug("analyze %s with %s", input_path, cfg.flags())
    try:
        analyzer = Analyzer(cfg)
        tables = load_tables(input_path, cfg.effective_row_tolerance)
        report = analyzer.analyze(tables, source=input_path)
    except InfeasibleSummaryError as e:
        _fail(e, EXIT_INFEASIBLE)
    except (ValueError, OSError) as e:
        _fail(e)

    for note in report.diagnostics:
        err.print(f"[yellow]warning:[/yellow] {note}", markup=True, highlight=False)
    _emit(render_json(report) if fmt == "json" else render_markdown(report), out)


@app.command()
def simulate(
    chi: Path = typer.Option(..., "--chi", help="Process matrix JSON: DiagonalChi or full entries_re/entries_im"),
    gate: str = typer.Option("cnot", help="identity|cnot|custom:<file>"),
    shots: int = typer.Option(None, help="Replace exact rows by multinomial frequencies"),
    seed: int = typer.Option(0, help="Sampler seed"),
    out: Path = typer.Option(None, "--out", "-o", help="Write the tables here instead of stdout"),
):
    """Generate Z/X error tables from a process matrix by exact channel simulation."""
    try:
        proc = load_process(chi)
        tables = Simulator(SimulateConfig(gate=gate, shots=shots, seed=seed)).simulate(proc, source=chi.name)
    except (ValueError, OSError, KeyError) as e:
        _fail(e)
    _emit(dumps_json(tables.to_document()), out)


@app.command()
def bounds(
    input_path: str = typer.Option(..., "--input", "-i", help="Error-table JSON ('-' for stdin)"),
    strict: bool = typer.Option(False, help=f"Row sums must equal 1 within {STRICT_ROW_TOLERANCE:g}"),
    row_tolerance: float = typer.Option(DEFAULT_ROW_TOLERANCE, help="Accepted row-sum deviation"),
):
    """Print the process-fidelity interval implied by F_Z and F_X."""
    try:
        tolerance = STRICT_ROW_TOLERANCE if strict else row_tolerance
        summary = summarize(load_tables(input_path, tolerance), tolerance)
    except (ValueError, OSError) as e:
        _fail(e)
    typer.echo(format_bounds(process_fidelity_bounds(summary)))


if __name__ == "__main__": app()
