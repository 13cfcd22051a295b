"""Tests for Gym CLI."""
