"""Prover strategies, sessions and the classical oracle."""
