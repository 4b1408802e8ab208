import csv
import itertools
import json
import logging
from pathlib import Path
from typing import Dict, Optional, Union

import numpy as np
from pydantic import ValidationError

from src.core import config
from src.core.errors import ConfigError, ProfileMismatchError
from src.models import (BoundaryCondition, BoundaryKind, InitialCondition, InitialKind, ModelId, ProblemConfig,
                        Profile, ProfileNorm, RunManifest, RunResult, Segment)
from src.output import AbstractSink, CsvSink
from src.services import fvsolver
from src.services.pn import pn_run

logger = logging.getLogger(__name__)

__all__ = (
    "builtin_configs",
    "load_config",
    "save_config",
    "read_profile",
    "compare_profiles",
    "run_model",
    "run_benchmark",
)


def _segment(start: float, end: float, value: float) -> Segment:
    return Segment(start=start, end=end, value=value)


def builtin_configs() -> Dict[str, ProblemConfig]:
    """Плоский источник и разрывный вариант задачи источник-пучок"""
    return {
        "plane_source": ProblemConfig(
            name="plane_source",
            domain=(-1.2, 1.2),
            t_final=1.0,
            sigma_a=[_segment(-1.2, 1.2, 0.0)],
            sigma_s=[_segment(-1.2, 1.2, 1.0)],
            q=[_segment(-1.2, 1.2, 0.0)],
            ic=InitialCondition(kind=InitialKind.PLANE_SOURCE_DELTA, psi_vac=config.PSI_VAC),
            bc_left=BoundaryCondition(kind=BoundaryKind.VACUUM_ISO, psi_vac=config.PSI_VAC),
            bc_right=BoundaryCondition(kind=BoundaryKind.VACUUM_ISO, psi_vac=config.PSI_VAC),
        ),
        "source_beam": ProblemConfig(
            name="source_beam",
            domain=(0.0, 3.0),
            t_final=2.5,
            sigma_a=[_segment(0.0, 2.0, 1.0), _segment(2.0, 3.0, 0.0)],
            sigma_s=[_segment(0.0, 1.0, 0.0), _segment(1.0, 2.0, 2.0), _segment(2.0, 3.0, 10.0)],
            q=[_segment(1.0, 1.5, 0.5)],
            ic=InitialCondition(kind=InitialKind.VACUUM, psi_vac=config.PSI_VAC),
            bc_left=BoundaryCondition(kind=BoundaryKind.BEAM, center=1.0, width=config.BEAM_WIDTH),
            bc_right=BoundaryCondition(kind=BoundaryKind.VACUUM_ISO, psi_vac=config.PSI_VAC),
        ),
    }


def load_config(source: Union[str, Path]) -> ProblemConfig:
    """Встроенная задача по имени или JSON-файл"""
    builtins = builtin_configs()
    if str(source) in builtins:
        return builtins[str(source)]
    path = Path(source)
    if not path.is_file():
        raise ConfigError(f"Конфигурация {source!s} не найдена (встроенные: {', '.join(builtins)}).")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as error:
        raise ConfigError(f"{path}: строка {error.lineno}, столбец {error.colno}: {error.msg}.")
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: ожидался JSON-объект.")
    try:
        return ProblemConfig.parse_obj(data)
    except ValidationError as error:
        first = error.errors()[0]
        key = ".".join(str(part) for part in first["loc"])
        raise ConfigError(f"{path}: ключ {key}: {first['msg']}.")


def save_config(cfg: ProblemConfig, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(cfg.json(by_alias=True, indent=2), encoding="utf-8")
    return path


def read_profile(path: Union[str, Path]) -> Profile:
    """Профиль x,u0 из CSV; строки с '#' - комментарии"""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Файл профиля {path} не найден.")
    model = ""
    with path.open(encoding="utf-8", newline="") as handle:
        lines = []
        for line in handle:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                if key == "model":
                    model = value
                continue
            lines.append(line)
    rows = list(csv.reader(lines))
    if not rows or "x" not in rows[0] or "u0" not in rows[0]:
        raise ConfigError(f"{path}: в заголовке нет столбцов x и u0.")
    header = rows[0]
    x_column, u0_column = header.index("x"), header.index("u0")
    try:
        x = np.array([float(row[x_column]) for row in rows[1:]])
        u0 = np.array([float(row[u0_column]) for row in rows[1:]])
    except (ValueError, IndexError) as error:
        raise ConfigError(f"{path}: повреждённая строка профиля ({error}).")
    return Profile(x=x, u0=u0, model=model)


def compare_profiles(a: Profile, b: Profile, norm: ProfileNorm = ProfileNorm.L1, relative: bool = False) -> float:
    """Расстояние между плотностями двух профилей на одной сетке"""
    if a.x.shape != b.x.shape or not np.allclose(a.x, b.x, rtol=0.0, atol=1e-9 * max(1.0, np.abs(b.x).max())):
        raise ProfileMismatchError("Профили заданы на разных сетках.")
    difference = np.abs(a.u0 - b.u0)
    if ProfileNorm(norm) is ProfileNorm.LINF:
        distance, scale = difference.max(), np.abs(b.u0).max()
    else:
        dx = b.dx if len(b.x) > 1 else 1.0
        distance, scale = dx * difference.sum(), dx * np.abs(b.u0).sum()
    return float(distance / scale) if relative else float(distance)


def run_model(cfg: ProblemConfig, model: ModelId, out: Optional[AbstractSink] = None, digest: str = "",
              points_per_half: int = config.QUAD_POINTS, gradient_tol: float = config.GRADIENT_TOL) -> RunResult:
    if model.is_linear:
        return pn_run(cfg, model.order, out, digest, points_per_half)
    return fvsolver.run(cfg, model, out, digest, points_per_half, gradient_tol)


def run_benchmark(manifest: RunManifest, sink: Optional[AbstractSink] = None) -> Dict[str, RunResult]:
    """Все модели манифеста последовательно, затем попарные относительные L1-расстояния"""
    cfg = load_config(manifest.config)
    overrides = {key: value for key, value in (("n_cells", manifest.n_cells), ("cfl", manifest.cfl))
                 if value is not None}
    if overrides:
        cfg = ProblemConfig.parse_obj({**cfg.dict(by_alias=True), **overrides})
    owned = sink is None
    sink = sink or CsvSink(manifest.out_dir)
    digest = manifest.digest()
    results = {}
    for model in manifest.model_ids():
        results[str(model)] = run_model(cfg, model, sink, digest, manifest.quad_points, manifest.gradient_tol)

    rows = []
    for first, second in itertools.combinations(results, 2):
        profile_a, profile_b = results[first].profile, results[second].profile
        rows.append((first, second,
                     compare_profiles(profile_a, profile_b, ProfileNorm.L1, relative=True),
                     compare_profiles(profile_a, profile_b, ProfileNorm.LINF, relative=True)))
    sink.write_table("comparison", ("model_a", "model_b", "l1_rel", "linf_rel"), rows,
                     comments=[f"config={cfg.name}", f"manifest={digest}", f"seed={manifest.seed}"], digits=10)
    if owned:
        sink.close()
    logger.info("Бенчмарк %s: %d моделей, манифест %s", cfg.name, len(results), digest)
    return results
