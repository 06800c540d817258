"""Efficient generalized ridge shrinkage paths and TRACE diagnostics."""
