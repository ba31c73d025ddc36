"""Run context and application errors."""
