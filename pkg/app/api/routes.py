from fastapi import APIRouter, HTTPException
from fastapi.concurrency import run_in_threadpool
from app.models.models import (
    RunConfig, RunReport, CharacterRequest, CharacterResponse, EvidenceRequest
)
from app.services.services import basis_service, invariant_service, verify_service, character_service
from app.utils.utils import FreeFieldError

# Computation Router
compute_router = APIRouter()

@compute_router.post("/basis", response_model=RunReport, response_model_exclude_none=True)
async def compute_basis(cfg: RunConfig):
    """Weight-space dimensions for every requested grade"""
    try:
        return await run_in_threadpool(basis_service.run, cfg)
    except FreeFieldError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        raise HTTPException(status_code=500, detail=f"Error computing basis: {str(e)}")

@compute_router.post("/invariants", response_model=RunReport, response_model_exclude_none=True)
async def compute_invariants(cfg: RunConfig):
    """Invariant dimensions per grade next to the generated span"""
    try:
        return await run_in_threadpool(invariant_service.run, cfg)
    except FreeFieldError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        raise HTTPException(status_code=500, detail=f"Error computing invariants: {str(e)}")

@compute_router.post("/evidence", response_model=RunReport, response_model_exclude_none=True)
async def compute_evidence(request: EvidenceRequest):
    """Generated span against invariants for N other than 2"""
    try:
        return await run_in_threadpool(invariant_service.evidence, request.n, request.k_max)
    except FreeFieldError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        raise HTTPException(status_code=500, detail=f"Error computing evidence: {str(e)}")

@compute_router.post("/verify", response_model=RunReport, response_model_exclude_none=True)
async def run_verify(cfg: RunConfig):
    """Run the property suite; failing properties are reported, not raised"""
    try:
        return await run_in_threadpool(verify_service.run, cfg)
    except FreeFieldError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        raise HTTPException(status_code=500, detail=f"Error running properties: {str(e)}")

@compute_router.post("/characters", response_model=CharacterResponse)
async def compute_characters(request: CharacterRequest):
    """Double-graded character table from the requested source"""
    try:
        return await run_in_threadpool(character_service.table, request)
    except FreeFieldError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        raise HTTPException(status_code=500, detail=f"Error computing characters: {str(e)}")
