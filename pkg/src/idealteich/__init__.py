"""Generalized Teichmüller spaces of glued ideal tetrahedra."""
