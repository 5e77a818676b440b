"""Tests for spinstat."""
