import os
from pathlib import Path

import environ

# Base directory
BASE_DIR = Path(__file__).resolve().parent.parent

env = environ.Env(
    DJANGO_DEBUG=(bool, False),
    GRID_LAB_DT=(float, 1e-3),
    GRID_LAB_NEWTON_TOL=(float, 1e-10),
    GRID_LAB_NEWTON_MAX_ITER=(int, 50),
    GRID_LAB_SETTLE_THRESHOLD=(float, 1e-3),
    GRID_LAB_INTEGRAL_GAIN=(float, 60.0),
    GRID_LAB_COMPARE_WORKERS=(int, 1),
    GRID_LAB_LOG_LEVEL=(str, "INFO"),
)
environ.Env.read_env(os.path.join(BASE_DIR, ".env"))  # optional .env next to manage.py

SECRET_KEY = env("DJANGO_SECRET_KEY", default="unsafe-dev-key")

DEBUG = env("DJANGO_DEBUG")

# Application definition
INSTALLED_APPS = [
    "apps.grid_lab",
]

# The commands keep no state between runs
DATABASES = {}

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

USE_TZ = True
TIME_ZONE = "UTC"

# Grid Lab simulation defaults; scenario fields and command flags override them
GRID_LAB_DATA_DIR = Path(env("GRID_LAB_DATA_DIR", default=str(BASE_DIR / "data")))
GRID_LAB_OUTPUT_DIR = Path(env("GRID_LAB_OUTPUT_DIR", default=str(BASE_DIR / "output")))
GRID_LAB_DT = env("GRID_LAB_DT")
GRID_LAB_NEWTON_TOL = env("GRID_LAB_NEWTON_TOL")
GRID_LAB_NEWTON_MAX_ITER = env("GRID_LAB_NEWTON_MAX_ITER")
GRID_LAB_SETTLE_THRESHOLD = env("GRID_LAB_SETTLE_THRESHOLD")
GRID_LAB_INTEGRAL_GAIN = env("GRID_LAB_INTEGRAL_GAIN")
GRID_LAB_COMPARE_WORKERS = env("GRID_LAB_COMPARE_WORKERS")
GRID_LAB_LOG_LEVEL = env("GRID_LAB_LOG_LEVEL").upper()

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "plain": {"format": "%(asctime)s %(levelname)s %(name)s: %(message)s"},
    },
    "handlers": {
        "console": {"class": "logging.StreamHandler", "formatter": "plain"},
    },
    "loggers": {
        "backend": {"handlers": ["console"], "level": GRID_LAB_LOG_LEVEL, "propagate": False},
        "apps": {"handlers": ["console"], "level": GRID_LAB_LOG_LEVEL, "propagate": False},
    },
}
