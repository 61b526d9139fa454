"""Levinson-type identities for the self-adjoint extensions of the Aharonov-Bohm operator.

Modules
-------
special_fn      complex Gamma/digamma and phase unwrapping
extensions      admissible pairs, the unitary parametrization and case labels
weyl_spectrum   Weyl matrix and negative bound states
scattering      scattering matrix, endpoint limits and the edge functions
winding         per-edge phases, total winding and the Var lemma
chern           Chern number and degree-3 pairing over a 2-sphere of extensions
cli             command-line front end
"""
from .errors import (BracketFailure, CountMismatch, DegenerateCase, InputError, IntegerDrift,
                     KernelDimension, LevinsonError, NonConvergence, PoleError,
                     RefinementNeeded, SingularBracket, VortexOnPlaquette)
from .extensions import classify, from_unitary, negative_count_cdstar, random_pair, to_unitary
from .scattering import gamma_edges, s_asymptotic, s_matrix
from .weyl_spectrum import bound_states, weyl_m
from .winding import levinson_check, total_winding, var_phi_ab

__version__ = "0.1.0"
