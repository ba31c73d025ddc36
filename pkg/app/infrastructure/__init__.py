"""Infrastructure layer - solver, storage and worker adapters."""
