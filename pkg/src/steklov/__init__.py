"""Spectral workbench for Steklov eigenfunctions on the disk and ball."""
