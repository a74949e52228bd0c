"""Tests for iips-rol."""
