"""Exact Moore-Penrose inverses and reverse order laws between indefinite inner product spaces."""
