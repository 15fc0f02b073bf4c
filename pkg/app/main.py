from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from app.api.routes import router
from app.core.config import settings
from app.core.reference_data import BIELLIPTIC_ROWS
from app.services.runs import LATTICE_NAMES
from app.utils.log_handler import configure_logging

configure_logging()

app = FastAPI(
    title=settings.APP_NAME,
    version=settings.VERSION,
    debug=settings.DEBUG
)

# CORS
app.add_middleware(
    CORSMiddleware,
    allow_origins=settings.CORS_ORIGINS,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

app.include_router(router, prefix="/api", tags=["verification"])


@app.get("/")
async def root():
    """Available actions and lattices"""
    return {
        "name": settings.APP_NAME,
        "bielliptic_rows": {row: data["d"] for row, data in BIELLIPTIC_ROWS.items()},
        "lattices": list(LATTICE_NAMES),
        "level_multiplier": settings.LEVEL_MULTIPLIER,
        "max_enumeration": settings.MAX_ENUMERATION,
    }


@app.get("/health")
async def health_check():
    """Health check endpoint"""
    return {"status": "healthy", "version": settings.VERSION}
