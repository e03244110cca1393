"""Test suite for the graph-state verifier"""
