"""Numerical laboratory for special solutions of the two-loop RG flow of metrics.

Submodules
----------
special_functions
    Real Lambert W on both branches.
ode
    Adaptive Dormand-Prince integration with events, multistart Newton.
curvature3d
    3D curvature algebra and fixed points of the flow.
constant_curvature
    Scale-factor evolution of constant-curvature metrics.
cigar
    The 2D steady gradient soliton.
homogeneous
    Diagonal metrics on 3D unimodular Lie groups.
cli
    Command-line driver (``rg2lab``).
"""

__version__ = "0.1.0"
