"""
Configuration for the Imprecise Hull Reconstruction toolkit
- Geometry tolerances and exact-arithmetic snapping
- Oracle limits for brute-force optimality checks
- Engine parameters (recourse bound, scapegoat balance, slab chains)
- Harness settings (seeds, batch sizes, benchmark sizes, SVG canvas)
- Batch execution (Celery / process pool)
- Logging
"""

from typing import Dict, List, Any
from enum import Enum
from pydantic_settings import BaseSettings
from pydantic import Field
import logging

logger = logging.getLogger("config")


class EngineType(str, Enum):
    """Available reconstruction engines"""
    NAIVE = "naive"
    KGON = "kgon"
    KGON_FAST = "kgon-fast"
    DISK = "disk"


class FamilyMode(str, Enum):
    """Region family modes"""
    KGON = "kgon"
    DISJOINT_DISKS = "disjoint-disks"
    UNIT_PLY = "unit-ply-k"


class InstanceKind(str, Enum):
    """Instance generator kinds"""
    POINTS = "points"
    TRIANGLES = "triangles"
    KGONS = "kgons"
    NESTED = "nested"
    NESTED_SPREAD = "nested-spread"
    FIVE_REGIONS = "five-regions"
    DISJOINT_DISKS = "disjoint-disks"
    UNIT_PLY = "unit-ply"


class CaseTag(str, Enum):
    """Algorithm cases in priority order"""
    NON_CANONICAL = "nonCanonical"
    NON_DIVIDING = "nonDividing"
    OCCUPIED = "occupied"
    SPANNING = "spanning"


DISK_MODES = (FamilyMode.DISJOINT_DISKS, FamilyMode.UNIT_PLY)


class Settings(BaseSettings):
    """Main application settings"""

    # ==================== CORE APPLICATION SETTINGS ====================

    DEBUG: bool = Field(default=False, env="DEBUG")
    TESTING: bool = Field(default=False, env="TESTING")
    ENVIRONMENT: str = Field(default="development", env="ENVIRONMENT")

    # ==================== GEOMETRY ====================

    EPSILON: float = Field(default=1e-9, env="EPSILON")
    DISK_MARGIN: float = Field(default=1e-6, env="DISK_MARGIN")
    SNAP_BITS: int = Field(default=32, env="SNAP_BITS")
    TERNARY_ITERATIONS: int = Field(default=200, env="TERNARY_ITERATIONS")
    SAMPLING_MAX_TRIES: int = Field(default=10000, env="SAMPLING_MAX_TRIES")

    # ==================== ORACLE ====================

    MAX_ORACLE_N: int = Field(default=12, env="MAX_ORACLE_N")
    ORACLE_HARD_LIMIT: int = Field(default=14, env="ORACLE_HARD_LIMIT")

    # ==================== ENGINES ====================

    DEFAULT_ENGINE: EngineType = Field(default=EngineType.NAIVE, env="DEFAULT_ENGINE")
    AUDIT_WITNESSES: bool = Field(default=True, env="AUDIT_WITNESSES")
    RECOURSE_FACTOR: int = Field(default=4, env="RECOURSE_FACTOR")
    SCAPEGOAT_ALPHA: float = Field(default=2.0 / 3.0, env="SCAPEGOAT_ALPHA")
    SLAB_CHAIN_FACTOR: int = Field(default=16, env="SLAB_CHAIN_FACTOR")

    # ==================== HARNESS ====================

    DEFAULT_SEED: int = Field(default=7, env="DEFAULT_SEED")
    BATCH_SIZE: int = Field(default=200, env="BATCH_SIZE")
    BENCH_SIZES: List[int] = Field(
        default=[64, 128, 256, 512, 1024, 2048, 4096],
        env="BENCH_SIZES"
    )
    SCALING_SLOPE_MAX: float = Field(default=1.3, env="SCALING_SLOPE_MAX")
    INSTANCE_VERSION: str = Field(default="ihr/1", env="INSTANCE_VERSION")

    # SVG canvas
    SVG_WIDTH: int = Field(default=800, env="SVG_WIDTH")
    SVG_HEIGHT: int = Field(default=600, env="SVG_HEIGHT")
    SVG_MARGIN: int = Field(default=30, env="SVG_MARGIN")

    # ==================== BATCH EXECUTION ====================

    USE_CELERY: bool = Field(default=False, env="USE_CELERY")
    CELERY_BROKER_URL: str = Field(default="memory://", env="CELERY_BROKER_URL")
    CELERY_RESULT_BACKEND: str = Field(default="cache+memory://", env="CELERY_RESULT_BACKEND")
    CELERY_TASK_ALWAYS_EAGER: bool = Field(default=True, env="CELERY_TASK_ALWAYS_EAGER")
    BATCH_WORKERS: int = Field(default=4, env="BATCH_WORKERS")
    TASK_TIME_LIMIT: int = Field(default=300, env="TASK_TIME_LIMIT")

    # ==================== LOGGING ====================

    LOG_LEVEL: str = Field(default="INFO", env="LOG_LEVEL")
    LOG_FORMAT: str = Field(
        default="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        env="LOG_FORMAT"
    )

    class Config:
        env_file = ".env"
        env_file_encoding = "utf-8"
        case_sensitive = True


# Global settings instance
settings = Settings()


def get_geometry_config() -> Dict[str, Any]:
    """Tolerances shared by the geometry and region modules"""
    return {
        "epsilon": settings.EPSILON,
        "disk_margin": settings.DISK_MARGIN,
        "snap_bits": settings.SNAP_BITS,
        "ternary_iterations": settings.TERNARY_ITERATIONS,
    }


def get_engine_config() -> Dict[str, Any]:
    """Engine parameters"""
    return {
        "default_engine": settings.DEFAULT_ENGINE.value,
        "audit_witnesses": settings.AUDIT_WITNESSES,
        "recourse_factor": settings.RECOURSE_FACTOR,
        "scapegoat_alpha": settings.SCAPEGOAT_ALPHA,
        "slab_chain_factor": settings.SLAB_CHAIN_FACTOR,
        "max_oracle_n": settings.MAX_ORACLE_N,
    }


def get_harness_config() -> Dict[str, Any]:
    """Harness parameters"""
    return {
        "seed": settings.DEFAULT_SEED,
        "batch_size": settings.BATCH_SIZE,
        "bench_sizes": list(settings.BENCH_SIZES),
        "scaling_slope_max": settings.SCALING_SLOPE_MAX,
        "svg": {
            "width": settings.SVG_WIDTH,
            "height": settings.SVG_HEIGHT,
            "margin": settings.SVG_MARGIN,
        },
    }


def get_celery_config() -> Dict[str, Any]:
    """Batch execution parameters"""
    return {
        "use_celery": settings.USE_CELERY,
        "broker_url": settings.CELERY_BROKER_URL,
        "result_backend": settings.CELERY_RESULT_BACKEND,
        "always_eager": settings.CELERY_TASK_ALWAYS_EAGER,
        "workers": settings.BATCH_WORKERS,
        "time_limit": settings.TASK_TIME_LIMIT,
    }


def validate_configuration() -> List[str]:
    """Validate configuration and return list of issues"""
    issues = []

    if settings.EPSILON <= 0:
        issues.append("EPSILON must be positive")

    if settings.DISK_MARGIN < settings.EPSILON:
        issues.append("DISK_MARGIN must not be smaller than EPSILON")

    if not 0.5 < settings.SCAPEGOAT_ALPHA < 1.0:
        issues.append("SCAPEGOAT_ALPHA must lie in (0.5, 1)")

    if settings.MAX_ORACLE_N > settings.ORACLE_HARD_LIMIT:
        issues.append("MAX_ORACLE_N exceeds ORACLE_HARD_LIMIT")

    if settings.ORACLE_HARD_LIMIT > 14:
        issues.append("ORACLE_HARD_LIMIT above 14 makes brute force impractical")

    if settings.SNAP_BITS < 8:
        issues.append("SNAP_BITS below 8 makes sampled realizations too coarse")

    if settings.RECOURSE_FACTOR < 1 or settings.SLAB_CHAIN_FACTOR < 1:
        issues.append("RECOURSE_FACTOR and SLAB_CHAIN_FACTOR must be positive")

    if not settings.BENCH_SIZES or min(settings.BENCH_SIZES) < 2:
        issues.append("BENCH_SIZES must list sizes of at least 2")

    if settings.BATCH_WORKERS < 1:
        issues.append("BATCH_WORKERS must be at least 1")

    return issues


def initialize_configuration():
    """Initialize and validate configuration"""
    issues = validate_configuration()

    if issues:
        logger.warning("Configuration issues found:")
        for issue in issues:
            logger.warning(f"  - {issue}")

        if settings.ENVIRONMENT == "production":
            raise ValueError("Configuration validation failed in production environment")
    else:
        logger.info("✅ Configuration initialized successfully")


# Auto-initialize on import
try:
    initialize_configuration()
except Exception as e:
    logger.error(f"Configuration initialization failed: {e}")


__all__ = [
    "settings",
    "Settings",
    "EngineType",
    "FamilyMode",
    "InstanceKind",
    "CaseTag",
    "DISK_MODES",
    "get_geometry_config",
    "get_engine_config",
    "get_harness_config",
    "get_celery_config",
    "validate_configuration",
]
