"""
Configuración y constantes del proyecto
Carga variables de entorno y define configuración global
"""

import os
from pathlib import Path
from dotenv import load_dotenv

# Cargar variables de entorno
load_dotenv()

# Directorios base
BASE_DIR = Path(__file__).parent.parent.resolve()
SRC_DIR = BASE_DIR / "src"
SPECS_DIR = BASE_DIR / "specs"
DATA_DIR = BASE_DIR / "data"
LOGS_DIR = BASE_DIR / "logs"
REPORTS_DIR = DATA_DIR / "reports"

# Crear directorios si no existen
for directory in [DATA_DIR, LOGS_DIR, REPORTS_DIR]:
    directory.mkdir(parents=True, exist_ok=True)

# Logging
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
LOG_FILE = os.getenv("LOG_FILE", str(LOGS_DIR / "tetradjet.log"))

# Pool de evaluación sobre la malla
TF_THREADS = max(1, int(os.getenv("TF_THREADS", "1")))

# Mallas de verificación
DEFAULT_GRID_POINTS = int(os.getenv("DEFAULT_GRID_POINTS", "5"))
GRID_INSET = float(os.getenv("GRID_INSET", "1e-3"))

# Cuadratura Gauss–Legendre (puntos por eje)
QUADRATURE_ORDER = int(os.getenv("QUADRATURE_ORDER", "4"))

# Solver Gauss–Newton / Levenberg
SOLVER_MAX_ITER = int(os.getenv("SOLVER_MAX_ITER", "100"))
SOLVER_DAMPING = float(os.getenv("SOLVER_DAMPING", "1e-3"))
SOLVER_RMS_TOL = 1e-10
SOLVER_STEP_TOL = 1e-12
SOLVER_COLLOCATION = os.getenv("SOLVER_COLLOCATION", "1,20,1,1")

# Fuzzing
FUZZ_SEED = int(os.getenv("FUZZ_SEED", "7"))
FUZZ_TRIALS = int(os.getenv("FUZZ_TRIALS", "200"))

# Export Settings
EXPORT_CSV = os.getenv("EXPORT_CSV", "true").lower() == "true"

# |det e| mínimo admitido
SINGULAR_DET_TOL = 1e-10

# Constante entre la ecuación de espín y det(e)·G (congelada tras calibrar)
EINSTEIN_CONSTANT = 1.0

# Tolerancias de cada verificación
TOLERANCES = {
    "two_route": 1e-9,
    "roundtrip": 1e-9,
    "torsion": 1e-9,
    "vacuum": 1e-8,
    "residual_a": 1e-9,
    "einstein": 1e-7,
    "contact": 1e-12,
    "contact_witness": 1e-3,
    "lorentz": 1e-9,
    "coordchange": 1e-9,
    "prop31": 1e-8,
    "prop32": 1e-10,
    "derivative": 1e-6,
    "contact_covariance": 1e-10,
    "defect_slope": 0.25,
    "noether_div": 1e-7,
    "critical": 1e-8,
    "variation": 1e-4,
}

# Mensajes de log
LOG_MESSAGES = {
    "suite_start": "🚀 Iniciando suite {suite} sobre {target}",
    "suite_success": "✅ Suite {suite} completada: {passed}/{total} verificaciones",
    "check_failed": "❌ {check}: desviación {deviation:.3e} > {tolerance:.1e}",
    "check_expected_fail": "⚠️ {check}: falla esperada declarada en [expect]",
    "suite_error": "❌ Error en suite {suite}: {error}",
    "all_complete": "📊 {count} verificaciones procesadas",
}
