import functools
import io
import json
import sys
from pathlib import Path
from typing import BinaryIO, Iterable, List, Optional, Sequence

import click
import structlog

from app.config import settings
from app.exceptions import TaxonomyError
from app.logging_config import configure_logging
from app.services.analysis_service import GridSpec, analysis_service
from app.services.catalog_service import BUNDLED_CATALOG, CatalogEntry, catalog_service
from app.services.lint_service import lint_service
from app.services.parser_service import parser_service
from app.taxonomy.diagnostics import Diagnostic, Severity
from app.taxonomy.model import AdrlLevel, SaeLevel, TaxonomyRecord

logger = structlog.get_logger(__name__)

PROG_NAME = "odd-taxonomy"

# Códigos de salida
EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_USAGE = 2


def handle_errors(func):
    """Convierte TaxonomyError en mensaje por stderr y código de salida 2"""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except TaxonomyError as e:
            logger.debug("cli.error", error=e.message, code=e.code)
            click.echo(f"error: {e.message}", err=True)
            click.get_current_context().exit(EXIT_USAGE)
    return wrapper


def _read_argument(value: str) -> str:
    """'-' lee el texto de stdin"""
    if value == "-":
        return click.get_text_stream("stdin").read().strip()
    return value


def _echo_diagnostics(diagnostics: Iterable[Diagnostic]) -> None:
    for diagnostic in diagnostics:
        click.echo(diagnostic.render(), err=True)


def _echo_json(payload) -> None:
    click.echo(json.dumps(payload, indent=2, ensure_ascii=False))


def _star_style(unicode_star: bool) -> str:
    return "unicode" if unicode_star else settings.STAR_STYLE


def _split_list(value: Optional[str]) -> Optional[List[str]]:
    if value is None:
        return None
    return [item.strip() for item in value.split(",") if item.strip()]


def _parse_sae_list(ctx, param, value: str) -> List[SaeLevel]:
    try:
        return [SaeLevel.parse(item) for item in _split_list(value) or []]
    except TaxonomyError as e:
        raise click.BadParameter(e.message)


def _looks_like_catalog(value: str) -> bool:
    return "|" not in value and (value == BUNDLED_CATALOG or Path(value).is_file())


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--log-level", default=None, help="Nivel de log (DEBUG, INFO, WARNING, ERROR)")
@click.version_option(settings.APP_VERSION, prog_name=PROG_NAME)
def cli(log_level: Optional[str]):
    """Taxonomía de ODD: parseo, validación, catálogos y análisis de huecos"""
    if log_level:
        configure_logging(level=log_level)


@cli.command()
@click.argument("text")
@click.option("--json", "as_json", is_flag=True, help="Valor estructurado en JSON")
@click.option("--unicode-star", is_flag=True, help="Usar ★ en la forma canónica")
@click.pass_context
@handle_errors
def parse(ctx, text: str, as_json: bool, unicode_star: bool):
    """Interpreta un registro o un ODD y muestra su forma canónica (TEXT o '-')"""
    result = parser_service.parse_any(_read_argument(text))
    _echo_diagnostics(result.diagnostics)
    if result.value is None:
        ctx.exit(EXIT_FINDINGS)
    if as_json:
        _echo_json(parser_service.to_dict(result.value))
    elif isinstance(result.value, TaxonomyRecord):
        click.echo(parser_service.canonicalize(result.value, _star_style(unicode_star)))
    else:
        click.echo(parser_service.canonicalize_odd(result.value, _star_style(unicode_star)))


@cli.command()
@click.argument("source")
@click.option("--rules", default=None, help="Reglas habilitadas separadas por comas, p. ej. R001,R002")
@click.option(
    "--deny",
    type=click.Choice([s.value for s in Severity]),
    default=Severity.ERROR.value,
    show_default=True,
    help="Severidad mínima que provoca salida 1",
)
@click.option("--json", "as_json", is_flag=True, help="Diagnósticos en JSON por stdout")
@click.pass_context
@handle_errors
def validate(ctx, source: str, rules: Optional[str], deny: str, as_json: bool):
    """Valida un registro (STRING o '-') o todas las entradas de un catálogo (FILE)"""
    enabled = _split_list(rules)
    lint_service.resolve_rules(enabled)
    diagnostics: List[Diagnostic] = []
    if _looks_like_catalog(source):
        catalog, load_diagnostics = catalog_service.read_catalog(source)
        diagnostics.extend(load_diagnostics)
        for entry in catalog.entries:
            for diagnostic in lint_service.run_lints(entry.record, enabled):
                diagnostics.append(Diagnostic(
                    diagnostic.rule_id,
                    diagnostic.severity,
                    f"[{entry.name}] {diagnostic.message}",
                    diagnostic.span,
                ))
    else:
        result = parser_service.parse_record(_read_argument(source))
        diagnostics.extend(result.diagnostics)
        if result.value is not None:
            diagnostics.extend(lint_service.run_lints(result.value, enabled))

    _echo_diagnostics(diagnostics)
    if as_json:
        _echo_json([d.to_dict() for d in diagnostics])
    if any(d.severity.at_least(Severity(deny)) for d in diagnostics):
        ctx.exit(EXIT_FINDINGS)


@cli.command()
@click.argument("text")
@click.option("--json", "as_json", is_flag=True, help="Explicación en JSON")
@click.pass_context
@handle_errors
def explain(ctx, text: str, as_json: bool):
    """Expande cada código de un registro u ODD en texto legible"""
    result = parser_service.parse_any(_read_argument(text))
    _echo_diagnostics(result.diagnostics)
    if result.value is None:
        ctx.exit(EXIT_FINDINGS)
    if isinstance(result.value, TaxonomyRecord):
        lines = parser_service.explain(result.value)
    else:
        lines = parser_service.explain_odd(result.value)
    if as_json:
        _echo_json([line._asdict() for line in lines])
        return
    for line in lines:
        click.echo(f"- {line.category} [{line.code}]: {line.description}")


@cli.command()
@click.argument("a")
@click.argument("b")
@click.option("--catalog", "catalog_path", default=None, help="Interpretar A y B como nombres de entradas del catálogo")
@click.option("--json", "as_json", is_flag=True, help="Informe en JSON")
@click.option("--out", type=click.Choice(["markdown", "csv", "json"]), default="markdown", show_default=True)
@click.pass_context
@handle_errors
def compare(ctx, a: str, b: str, catalog_path: Optional[str], as_json: bool, out: str):
    """Compara dos registros dimensión a dimensión"""
    if catalog_path:
        catalog, diagnostics = catalog_service.read_catalog(catalog_path)
        _echo_diagnostics(diagnostics)
        entries = []
        for name in (a, b):
            entry = catalog.get(name)
            if entry is None:
                click.echo(f"error: la entrada '{name}' no existe en {catalog_path}", err=True)
                ctx.exit(EXIT_USAGE)
            entries.append(entry)
    else:
        entries = []
        for text in (a, b):
            result = parser_service.parse_record(_read_argument(text))
            _echo_diagnostics(result.diagnostics)
            if result.value is None:
                ctx.exit(EXIT_FINDINGS)
            entries.append(CatalogEntry(parser_service.canonicalize(result.value), result.value))
    report = analysis_service.compare_entries(*entries)
    click.echo(analysis_service.render_report(report, "json" if as_json else out), nl=False)


@cli.group()
def catalog():
    """Operaciones sobre ficheros de catálogo (json o text)"""


_input_format = click.option(
    "--format",
    "input_format",
    type=click.Choice(["json", "text"]),
    default=None,
    help="Formato de entrada (por defecto se detecta)",
)


@catalog.command("check")
@click.argument("path")
@_input_format
@click.pass_context
@handle_errors
def catalog_check(ctx, path: str, input_format: Optional[str]):
    """Carga el catálogo y reporta entradas con problemas"""
    loaded, diagnostics = catalog_service.read_catalog(path, input_format)
    _echo_diagnostics(diagnostics)
    click.echo(f"{len(loaded)} entries")
    if any(d.is_error for d in diagnostics):
        ctx.exit(EXIT_FINDINGS)


@catalog.command("list")
@click.argument("path")
@_input_format
@click.option("--json", "as_json", is_flag=True)
@click.option("--unicode-star", is_flag=True)
@click.pass_context
@handle_errors
def catalog_list(ctx, path: str, input_format: Optional[str], as_json: bool, unicode_star: bool):
    """Lista las entradas con su registro canónico"""
    loaded, diagnostics = catalog_service.read_catalog(path, input_format)
    _echo_diagnostics(diagnostics)
    star_style = _star_style(unicode_star)
    if as_json:
        _echo_json([
            {"name": entry.name, "taxonomy": parser_service.canonicalize(entry.record, star_style)}
            for entry in loaded.entries
        ])
    else:
        for entry in loaded.entries:
            click.echo(f"{entry.name} :: {parser_service.canonicalize(entry.record, star_style)}")
    if any(d.is_error for d in diagnostics):
        ctx.exit(EXIT_FINDINGS)


@catalog.command("canonicalize")
@click.argument("path")
@_input_format
@click.option("--to", "output_format", type=click.Choice(["json", "text"]), default=None,
              help="Formato de salida (por defecto, el de entrada)")
@click.option("--unicode-star", is_flag=True)
@click.pass_context
@handle_errors
def catalog_canonicalize(ctx, path: str, input_format: Optional[str], output_format: Optional[str], unicode_star: bool):
    """Reescribe el catálogo en forma canónica por stdout"""
    data = catalog_service.read_bytes(path)
    input_format = input_format or catalog_service.detect_format(data)
    loaded, diagnostics = catalog_service.load_catalog(data, input_format)
    _echo_diagnostics(diagnostics)
    payload = catalog_service.save_catalog(loaded, output_format or input_format, _star_style(unicode_star))
    click.echo(payload.decode("utf-8"), nl=False)
    if any(d.is_error for d in diagnostics):
        ctx.exit(EXIT_FINDINGS)


@cli.command()
@click.option("--catalog", "catalog_path", default=None, help="Catálogo (por defecto CATALOG_PATH o paper-examples)")
@click.option("--axis", "axes", multiple=True, help="Eje DIMENSIÓN=V1,V2,... (repetible)")
@click.option("--sae", default="4", show_default=True, callback=_parse_sae_list, help="Niveles SAE, p. ej. 2,3,4")
@click.option("--min-adrl", type=click.IntRange(1, 9), default=None, help="ADRL mínimo de la demanda")
@click.option("--relax-tags/--no-relax-tags", default=None, help="Ignorar los requisitos adicionales del ofertante")
@click.option("--defaults", default=None, help="Valores fijos en forma solo-ODD")
@click.option("--out", type=click.Choice(["markdown", "csv", "json"]), default="markdown", show_default=True)
@click.option("--fail-on-gaps", is_flag=True, help="Salida 1 si existe algún white spot")
@click.option("--workers", type=click.IntRange(1), default=None, help="Hilos para evaluar las celdas")
@click.pass_context
@handle_errors
def gaps(
    ctx,
    catalog_path: Optional[str],
    axes: Sequence[str],
    sae: List[SaeLevel],
    min_adrl: Optional[int],
    relax_tags: Optional[bool],
    defaults: Optional[str],
    out: str,
    fail_on_gaps: bool,
    workers: Optional[int],
):
    """Análisis de huecos (white spots) sobre una rejilla de demandas"""
    catalog_path = catalog_path or settings.CATALOG_PATH or BUNDLED_CATALOG
    loaded, diagnostics = catalog_service.read_catalog(catalog_path)
    _echo_diagnostics(diagnostics)

    fixed = None
    if defaults:
        result = parser_service.parse_odd(defaults)
        _echo_diagnostics(result.diagnostics)
        if result.value is None:
            ctx.exit(EXIT_USAGE)
        fixed = result.value

    grid = GridSpec(
        axes=tuple(analysis_service.parse_axis(axis) for axis in axes),
        defaults=fixed,
        min_adrl=AdrlLevel.parse(min_adrl or settings.DEFAULT_MIN_ADRL),
        sae_levels=tuple(sae),
    )
    report = analysis_service.gap_analysis(
        loaded,
        grid,
        relax_tags=settings.RELAX_TAGS if relax_tags is None else relax_tags,
        catalog_label=catalog_path,
        workers=workers,
    )
    click.echo(analysis_service.render_report(report, out), nl=False)
    if fail_on_gaps and analysis_service.white_spots(report):
        ctx.exit(EXIT_FINDINGS)


@cli.command()
@click.option("--json", "as_json", is_flag=True)
def rules(as_json: bool):
    """Lista las reglas de lint registradas"""
    infos = lint_service.list_rules()
    if as_json:
        _echo_json([info.to_dict() for info in infos])
        return
    for info in infos:
        suffix = "" if info.enabled_by_default else " (opcional)"
        click.echo(f"{info.rule_id} {info.severity.value:<7} {info.title}{suffix}")


@cli.command()
@click.option("--host", default="0.0.0.0", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--reload", is_flag=True)
def serve(host: str, port: int, reload: bool):
    """Arranca la API HTTP con uvicorn"""
    import uvicorn

    uvicorn.run("app.main:app", host=host, port=port, reload=reload)


def run_cli(
    args: Sequence[str],
    stdin: Optional[BinaryIO] = None,
    stdout: Optional[BinaryIO] = None,
    stderr: Optional[BinaryIO] = None,
) -> int:
    """
    Ejecuta la CLI sobre flujos de bytes y devuelve el código de salida.

    0 sin hallazgos, 1 con hallazgos, 2 en errores de uso o de E/S.
    """
    streams = {
        "stdin": io.TextIOWrapper(stdin or io.BytesIO(), encoding="utf-8"),
        "stdout": io.TextIOWrapper(stdout or io.BytesIO(), encoding="utf-8", write_through=True),
        "stderr": io.TextIOWrapper(stderr or io.BytesIO(), encoding="utf-8", write_through=True),
    }
    saved = sys.stdin, sys.stdout, sys.stderr
    sys.stdin, sys.stdout, sys.stderr = streams["stdin"], streams["stdout"], streams["stderr"]
    try:
        try:
            rv = cli.main(args=list(args), prog_name=PROG_NAME, standalone_mode=False)
        except click.ClickException as e:
            e.show()
            return e.exit_code
        except click.Abort:
            click.echo("Aborted!", err=True)
            return EXIT_FINDINGS
        return rv if isinstance(rv, int) else EXIT_OK
    finally:
        for stream in streams.values():
            if stream.writable():
                stream.flush()
            stream.detach()
        sys.stdin, sys.stdout, sys.stderr = saved


def main() -> None:
    cli(prog_name=PROG_NAME)


if __name__ == "__main__":
    main()
