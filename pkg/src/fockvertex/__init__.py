"""Vertex operator realizations of toroidal gl_N on truncated Fock spaces."""
