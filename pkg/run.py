"""
Quick start script for running the Stratmon HTTP API
"""
import uvicorn
from app.config import settings

if __name__ == "__main__":
    print("=" * 70)
    print("Starting Stratmon API")
    print("=" * 70)
    print(f"Host: {settings.HOST}:{settings.PORT}")
    print(f"API Docs: http://{settings.HOST}:{settings.PORT}/docs")
    print(f"Debug: {settings.DEBUG}")
    print(f"Max candidates: {settings.MAX_CANDIDATES}")
    print("=" * 70)

    uvicorn.run(
        "app.main:app",
        host=settings.HOST,
        port=settings.PORT,
        reload=settings.DEBUG
    )
