"""Interpolation of positive semidefinite tensors along square-root geodesics."""
