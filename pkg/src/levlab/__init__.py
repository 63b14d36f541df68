"""Numerical verification laboratory for topological Levinson theorems.

The package computes boundary data of wave operators for explicitly solvable
scattering systems (half-line Robin model, point interactions in d=1,2,3,
Aharonov-Bohm extensions, genuine 1D/3D potentials), winding numbers of the
resulting unitary loops (by phase unwrapping, by the analytic trace formula,
and in Schatten-regularized form), bound-state counts, and checks the index
identities relating them -- including the higher-degree (Chern) identity over
a sphere of extensions.
"""

__version__ = "0.1.0"
