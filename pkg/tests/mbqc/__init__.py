"""Tests for measurement patterns"""
