"""Application layer - run context and per-area services."""
