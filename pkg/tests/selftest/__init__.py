"""Tests for the self-test audit"""
