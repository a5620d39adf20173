"""HTTP face of the simulator: pydantic schemas plus the FastAPI app."""
