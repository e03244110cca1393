"""Tests for TEST settings and the verifier"""
