"""Tests for prover strategies, sessions and the classical oracle"""
