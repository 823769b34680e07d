"""Rain-aware radio propagation and UAV trajectory design.

Subpackages cover the rain medium model, a split-step parabolic-equation
solver, an ITU-R cross-check, SIR radio maps, the trajectory MDP and a
dueling double deep-Q agent with multi-step returns.
"""

__version__ = "0.1.0"
