import functools
import logging
from pathlib import Path
from typing import List

import click
import uvicorn
from pydantic import ValidationError

from src.core import config
from src.core.errors import ConfigError, MomentModelError
from src.core.logger import setup_logging
from src.models import SCAN_HEADER, AngularBasis, ModelId, MomentVector, ProfileNorm, RunManifest, ScanMode
from src.output import CsvSink
from src.services import (check, compare_profiles, get_closure_service, get_eigen_service, read_profile,
                          run_benchmark)

logger = logging.getLogger(__name__)

__all__ = ("cli",)

# код выхода, когда check признал вектор нереализуемым
EXIT_NOT_REALIZABLE = 4


def handle_errors(command):
    """Ошибки библиотеки печатаются в stderr и превращаются в код выхода"""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except MomentModelError as error:
            click.echo(f"Ошибка: {error.detail}", err=True)
            raise SystemExit(error.exit_code)

    return wrapper


def parse_moments(text: str) -> List[float]:
    try:
        return [float(value) for value in text.split(",")]
    except ValueError:
        raise ConfigError(f"Не удалось разобрать моменты: {text!r}.")


def parse_vector(basis_id: str, text: str) -> MomentVector:
    basis: AngularBasis = ModelId.parse(basis_id).basis
    values = parse_moments(text)
    if len(values) != basis.n:
        raise ConfigError(f"Базису {basis_id} нужно {basis.n} моментов, передано {len(values)}.")
    return MomentVector(basis=basis, values=values)


def _number(value: float) -> str:
    return format(value, ".12g")


@click.group()
@click.option("--log-level", default=None, help="Уровень логирования пакета src.")
def cli(log_level):
    setup_logging(log_level)


@cli.command()
@click.option("--config", "config_source", required=True, help="plane_source, source_beam или путь к JSON.")
@click.option("--model", "models", required=True, help="Список моделей через запятую, например DMM2,MM1,PN99.")
@click.option("--cells", type=int, default=None, help="Число ячеек (по умолчанию из конфигурации).")
@click.option("--out", type=click.Path(path_type=Path), default=config.OUTPUT_DIR, show_default=True)
@click.option("--cfl", type=float, default=None)
@click.option("--quad", type=int, default=config.QUAD_POINTS, show_default=True)
@click.option("--tol", type=float, default=config.GRADIENT_TOL, show_default=True)
@handle_errors
def solve(config_source, models, cells, out, cfl, quad, tol):
    """Расчёт задачи для списка моделей"""
    try:
        manifest = RunManifest(config=config_source, models=[m.strip() for m in models.split(",") if m.strip()],
                               out_dir=out, n_cells=cells, cfl=cfl, quad_points=quad, gradient_tol=tol)
    except ValidationError as error:
        first = error.errors()[0]
        raise ConfigError(f"{'.'.join(map(str, first['loc']))}: {first['msg']}.")
    results = run_benchmark(manifest, CsvSink(manifest.out_dir))
    for name, result in results.items():
        mass = result.state.total_mass()
        click.echo(f"{name}: масса {_number(mass)}, баланс {result.ledger.discrepancy(mass):.3e}, "
                   f"регуляризаций {result.safeguard_total}")


@cli.command("eigen-scan")
@click.option("--mode", type=click.Choice([mode.value for mode in ScanMode]), default=ScanMode.MEAN_CUT.value)
@click.option("--reg", type=float, default=config.SCAN_REGULARIZATION, show_default=True)
@click.option("--resolution", type=int, default=config.SCAN_RESOLUTION, show_default=True)
@click.option("--out", type=click.Path(path_type=Path), required=True)
@handle_errors
def eigen_scan(mode, reg, resolution, out):
    """Скан собственных значений DMM2 по реализуемому множеству"""
    if out.suffix != ".csv":
        raise ConfigError(f"Файл скана должен иметь расширение .csv: {out}.")
    table = get_eigen_service().scan(ScanMode(mode), resolution, reg)
    sink = CsvSink(out.parent)
    sink.write_table(out.stem, SCAN_HEADER, table.records(), digits=10)
    sink.close()
    failed = sum(row.failed for row in table.rows)
    click.echo(f"Строк: {len(table.rows)}, без замыкания: {failed}")


@cli.group()
def realizability():
    """Проверки реализуемости"""


@realizability.command("check")
@click.option("--basis", default="dmm2", show_default=True)
@click.option("--moments", required=True, help="Моменты через запятую.")
@click.option("--tol", type=float, default=config.REALIZABILITY_TOL, show_default=True)
@handle_errors
def realizability_check(basis, moments, tol):
    verdict = check(parse_vector(basis, moments), tol)
    click.echo(f"realizable={str(verdict.realizable).lower()} margin={_number(verdict.margin)}")
    if not verdict.realizable:
        raise SystemExit(EXIT_NOT_REALIZABLE)


@cli.group()
def closure():
    """Двойственная задача минимума энтропии"""


@closure.command("solve")
@click.option("--basis", default="dmm2", show_default=True)
@click.option("--moments", required=True, help="Моменты через запятую.")
@click.option("--tol", type=float, default=config.GRADIENT_TOL, show_default=True)
@handle_errors
def closure_solve(basis, moments, tol):
    u = parse_vector(basis, moments)
    solution = get_closure_service(u.basis, config.QUAD_POINTS, tol).solve_dual(u)
    click.echo("alpha=" + ",".join(map(_number, solution.alpha.alpha)))
    click.echo("flux=" + ",".join(map(_number, solution.flux_moments)))
    click.echo(f"residual={solution.residual_norm:.3e} iterations={solution.iterations} "
               f"regularization={_number(solution.regularization_used)}")


@cli.command()
@click.option("--a", "path_a", type=click.Path(path_type=Path), required=True)
@click.option("--b", "path_b", type=click.Path(path_type=Path), required=True)
@click.option("--norm", type=click.Choice([norm.value for norm in ProfileNorm]), default=ProfileNorm.L1.value)
@click.option("--relative", is_flag=True, default=False)
@handle_errors
def compare(path_a, path_b, norm, relative):
    """Расстояние между профилями плотности"""
    distance = compare_profiles(read_profile(path_a), read_profile(path_b), ProfileNorm(norm), relative)
    click.echo(_number(distance))


@cli.command()
@click.option("--host", default="0.0.0.0", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """HTTP-сервер на uvicorn"""
    uvicorn.run("main:app", host=host, port=port)
