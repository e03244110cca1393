"""Tests for record streams and statistics"""
