"""Graphs, triangle covers and graph spec files."""
