"""API v1 routes"""
from fastapi import APIRouter
from app.api.v1 import models, check, monitor, verify, experiments

api_router = APIRouter()

api_router.include_router(models.router)
api_router.include_router(check.router)
api_router.include_router(monitor.router)
api_router.include_router(verify.router)
api_router.include_router(experiments.router)
