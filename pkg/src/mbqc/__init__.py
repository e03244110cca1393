"""Adaptive measurement patterns."""
