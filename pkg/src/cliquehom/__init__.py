"""Weighted clique complexes, filtrations, Laplacian walks and gadget compilation."""
