"""Tests for the prakriti package."""
