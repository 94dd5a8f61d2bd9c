from functools import lru_cache
from typing import List, Literal, Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file=".env", case_sensitive=True, extra="ignore")

    # Configuración de la aplicación
    APP_NAME: str = "ODD Taxonomy"
    APP_VERSION: str = "1.0.0"
    DEBUG: bool = False

    # Configuración de logging
    LOG_LEVEL: str = "WARNING"
    LOG_JSON: bool = False

    # Configuración de la taxonomía
    STAR_STYLE: Literal["ascii", "unicode"] = "ascii"
    DEFAULT_MIN_ADRL: int = Field(9, ge=1, le=9)
    RELAX_TAGS: bool = True

    # Catálogo por defecto (None = catálogo de ejemplos incluido en el paquete)
    CATALOG_PATH: Optional[str] = None

    # Número de hilos para evaluar las celdas del análisis de huecos
    GAP_WORKERS: int = Field(1, ge=1)

    # Configuración de seguridad
    CORS_ORIGINS: List[str] = ["*"]  # En producción, especificar los orígenes permitidos


@lru_cache()
def get_settings() -> Settings:
    """Obtiene la configuración de la aplicación con caché"""
    return Settings()


# Instancia global de la configuración
settings = get_settings()
