"""Riesz transforms on the ax+b group: kernels, symbols and multiscale models."""
