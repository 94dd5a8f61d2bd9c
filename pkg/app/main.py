from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from app.config import settings
from app.routers import catalog_router, gaps_router, taxonomy_router
from app.services.lint_service import lint_service

# Crear la aplicación FastAPI
app = FastAPI(
    title=settings.APP_NAME,
    description="API REST para clasificar sistemas de conducción automatizada por SAE, ODD y ADRL",
    version=settings.APP_VERSION,
)

# Configurar CORS
app.add_middleware(
    CORSMiddleware,
    allow_origins=settings.CORS_ORIGINS,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Incluir routers
app.include_router(taxonomy_router.router)
app.include_router(taxonomy_router.lint_router)
app.include_router(catalog_router.router)
app.include_router(gaps_router.router)


@app.get("/health")
async def health_check():
    """Endpoint para verificar el estado de la API"""
    return {
        "status": "ok",
        "message": "API funcionando correctamente",
        "version": settings.APP_VERSION,
        "rules": len(lint_service.list_rules()),
    }


@app.get("/")
async def root():
    """Endpoint raíz que devuelve información básica de la API"""
    return {
        "message": f"Bienvenido a la API {settings.APP_NAME}",
        "version": settings.APP_VERSION,
        "endpoints": {
            "taxonomy": {
                "parse": "/api/taxonomy/parse",
                "validate": "/api/taxonomy/validate",
                "explain": "/api/taxonomy/explain",
                "compare": "/api/taxonomy/compare",
            },
            "lint_rules": "/api/lint/rules",
            "catalog": {
                "entries": "/api/catalog/entries",
                "query": "/api/catalog/query",
            },
            "gaps": "/api/gaps",
        },
    }


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(app, host="0.0.0.0", port=8000)
