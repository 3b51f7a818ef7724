"""Tests for readout_correlation_analyser."""
