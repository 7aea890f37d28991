from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from contextlib import asynccontextmanager
from app.archive import open_archive, close_archive
from app.api.routes import compute_router
from app.config import settings
from app.models.models import HealthResponse
from app.utils.utils import configure_logging
from datetime import datetime, timezone

@asynccontextmanager
async def lifespan(app: FastAPI):
    configure_logging(settings.log_level)
    open_archive()
    yield
    close_archive()

app = FastAPI(
    title=settings.api_title,
    description="Weight spaces, vertex algebra products and vector-field invariants of the βγ-bc system",
    version=settings.api_version,
    lifespan=lifespan
)

# Configure CORS
app.add_middleware(
    CORSMiddleware,
    allow_origins=settings.cors_origins,
    allow_methods=["POST", "OPTIONS"],
    allow_headers=["Content-Type"],
)

# Include routers
app.include_router(compute_router, prefix="/api", tags=["Free Field Computations"])

@app.post("/")
async def root():
    return {"message": "Free Field Invariants API is running!"}

@app.post("/api/health", response_model=HealthResponse)
async def health_check():
    return HealthResponse(
        status="success",
        message="Server is running",
        timestamp=datetime.now(timezone.utc)
    )
