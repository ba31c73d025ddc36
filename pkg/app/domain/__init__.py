"""Domain layer - spin physics, inverse problems and protocol models."""
