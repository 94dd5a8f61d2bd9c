from typing import Optional


class TaxonomyError(Exception):
    """Excepción base para errores de la taxonomía"""
    def __init__(self, message: str, code: int = 500, details: Optional[dict] = None):
        self.message = message
        self.code = code
        self.details = details or {}
        super().__init__(message)


class InvalidValueError(TaxonomyError, ValueError):
    """Excepción para valores que violan los invariantes de un tipo"""
    def __init__(self, message: str, details: Optional[dict] = None):
        super().__init__(message=message, code=400, details=details)


class UnknownRuleIdError(TaxonomyError):
    """Excepción para reglas de lint que no existen en el registro"""
    def __init__(self, rule_ids):
        rule_ids = sorted(rule_ids)
        super().__init__(
            message=f"Regla(s) de lint desconocida(s): {', '.join(rule_ids)}",
            code=400,
            details={"rule_ids": rule_ids}
        )


class MalformedContainerError(TaxonomyError):
    """Excepción para catálogos que no se pueden decodificar"""
    def __init__(self, error: str):
        super().__init__(
            message=f"Catálogo mal formado: {error}",
            code=422,
            details={"error": error}
        )


class UnsupportedVersionError(TaxonomyError):
    """Excepción para versiones de catálogo no soportadas"""
    def __init__(self, version):
        super().__init__(
            message=f"Versión de catálogo no soportada: {version!r}",
            code=422,
            details={"version": version}
        )


class CatalogIOError(TaxonomyError):
    """Excepción para errores de lectura/escritura de catálogos"""
    def __init__(self, path: str, error: str, code: int = 500):
        super().__init__(
            message=f"No se pudo acceder al catálogo '{path}': {error}",
            code=code,
            details={"path": path, "error": error}
        )


class DuplicateEntryError(TaxonomyError):
    """Excepción para entradas con nombre repetido"""
    def __init__(self, name: str):
        super().__init__(
            message=f"Ya existe una entrada llamada '{name}'",
            code=409,
            details={"name": name}
        )


class EntryNotFoundError(TaxonomyError):
    """Excepción para cuando una entrada no existe"""
    def __init__(self, name: str):
        super().__init__(
            message=f"La entrada '{name}' no existe",
            code=404,
            details={"name": name}
        )


class InvalidGridError(TaxonomyError):
    """Excepción para rejillas de demanda mal definidas"""
    def __init__(self, message: str, details: Optional[dict] = None):
        super().__init__(message=message, code=400, details=details)


class EmptyGridError(InvalidGridError):
    """Excepción para rejillas cuyo producto cartesiano es vacío"""
    def __init__(self):
        super().__init__("La rejilla de demanda no contiene ninguna celda")
