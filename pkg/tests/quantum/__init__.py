"""Tests for the state-vector simulator"""
