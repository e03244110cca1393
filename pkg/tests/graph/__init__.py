"""Tests for graphs, triangle covers and graph spec files"""
