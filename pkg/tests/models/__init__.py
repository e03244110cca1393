"""Tests for spec and record models"""
