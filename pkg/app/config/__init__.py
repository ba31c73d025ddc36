"""Settings, run configuration and tabulated reference data."""
