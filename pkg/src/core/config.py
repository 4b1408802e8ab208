import os
from pathlib import Path


VERSION: str = "1.0.0"

# Название проекта. Используется в Swagger-документации и в заголовках CSV
PROJECT_NAME: str = os.getenv("PROJECT_NAME", "dmm_closures")

# Квадратура: число точек Гаусса на каждой полуоси
QUAD_POINTS: int = int(os.getenv("QUAD_POINTS", 50))

# Настройки двойственной задачи (метод Ньютона)
GRADIENT_TOL: float = float(os.getenv("GRADIENT_TOL", 1e-9))
MAX_NEWTON_ITERATIONS: int = int(os.getenv("MAX_NEWTON_ITERATIONS", 200))
ARMIJO_C: float = float(os.getenv("ARMIJO_C", 1e-4))
MIN_STEP: float = float(os.getenv("MIN_STEP", 2.0 ** -30))
EXP_SHIFT_THRESHOLD: float = 700.0
REGULARIZATION_LADDER: tuple = tuple(
    float(r) for r in os.getenv("REGULARIZATION_LADDER", "0,1e-8,1e-6,1e-4,1e-2").split(",")
)

# Реализуемость
REALIZABILITY_TOL: float = float(os.getenv("REALIZABILITY_TOL", 1e-12))
SAFEGUARD_MARGIN: float = float(os.getenv("SAFEGUARD_MARGIN", 1e-12))
SAFEGUARD_BISECTIONS: int = int(os.getenv("SAFEGUARD_BISECTIONS", 30))

# Конечно-объёмная схема
CFL: float = float(os.getenv("CFL", 0.9))
N_CELLS: int = int(os.getenv("N_CELLS", 1000))
PSI_VAC: float = float(os.getenv("PSI_VAC", 0.5e-8))
BEAM_WIDTH: float = float(os.getenv("BEAM_WIDTH", 1e5))

# Сканы собственных значений
SCAN_RESOLUTION: int = int(os.getenv("SCAN_RESOLUTION", 101))
SCAN_REGULARIZATION: float = float(os.getenv("SCAN_REGULARIZATION", 0.05))

# Корень проекта
BASE_DIR = Path(__file__).resolve().parent.parent.parent

OUTPUT_DIR: Path = Path(os.getenv("OUTPUT_DIR", BASE_DIR / "results"))
LOG_CONFIG: Path = Path(os.getenv("LOG_CONFIG", BASE_DIR / "logging.ini"))
LOG_LEVEL: str = os.getenv("LOG_LEVEL", "")
