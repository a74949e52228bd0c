"""Exact scalars, matrices, weights and result models."""
