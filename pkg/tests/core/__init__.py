"""Tests for logging setup and seed derivation"""
