"""Exact and certified computations for the Markov and Lagrange spectra.

Modules: ``cf_core`` (continued fractions and surds), ``symbolic_dynamics``
(Markov and Lagrange values of bi-infinite sequences), ``subshift_graph``
(transition graphs and their components), ``dimension`` (Hausdorff dimension
enclosures), ``spectra`` and ``splice`` (pruning, D(t) scans, the discrete
spectrum and the block-insertion map) and ``cli``.
"""
from .cf_core import CFValue, Expansion, compare, convergents, cylinder, named_constants, parse_expansion
from .dimension import DimBound, branch_sums_verify, hd_bounds
from .errors import EmptyResultError, InputError, NotMixingError, SpectraError
from .spectra import D_estimate, build_Pt, discrete_below_3, prune_words, scan
from .splice import holder_exponent_probe, splice_theta
from .subshift_graph import TransitionGraph, scc_decompose
from .surd import Surd
from .symbolic_dynamics import BiSeq, lagrange_value, markov_value, max_lambda0_on_subshift

__version__ = "0.1.0"
