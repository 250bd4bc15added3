"""
Main API v1 router - combines all endpoint routers
"""

from fastapi import APIRouter

from app.api.v1.endpoints import claims, experiments, families

# Create main API router
api_router = APIRouter()

# Include sub-routers
api_router.include_router(
    families.router,
    prefix="/families",
    tags=["Families"]
)

api_router.include_router(
    experiments.router,
    prefix="/experiments",
    tags=["Experiments"]
)

api_router.include_router(
    claims.router,
    prefix="/claims",
    tags=["Claims"]
)
