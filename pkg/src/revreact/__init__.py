"""Simulation and verification toolkit for the reversible reaction-diffusion
system A + B <-> C on boxes, with possibly degenerate diffusion.

Subpackages follow the pipeline: model (equilibrium algebra), grid
(finite-volume discretization), solver (Strang splitting), functionals
(entropy / dissipation / inequality checks), analysis (decay-envelope fits
and audits), oracle (independent test references), cli (batch front end).
"""

__version__ = "0.1.0"
