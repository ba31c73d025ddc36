"""Spin model: constants, operators and Hamiltonian builders."""
