"""Constructive approximation with multiplicative neural networks."""
from .net import (CompositionError, FormatError, Layer, MultiplicativeNetwork, NetworkError, NeuronSpec,
                  NumericalOverflow, VersionError, affine_network, append_linear_head, compose_parallel,
                  count_resources, deserialize, evaluate, evaluate_batch, serialize)
from .poly import Polynomial, horner_eval, realize, realize_chebyshev_poly, realize_monomial_poly
from .cheb import KernelSpec, build_kernel_net, builtin_kernel, certified_bound, select_degree
from .maurey import FourierProfile, MaureyAtom, build_bandlimited_net, sample_atoms, total_mass
from .sobolev import SobolevTarget, build_sobolev_net, exp_kernel_spec, select_band, tail_bound
from .relu import ReLUNetwork, build_product_gadget, lower_to_relu, relu_eval
from .metrics import ErrorEstimate, mc_l2_error, sinc_reconstruct, sup_error_grid

__version__ = "0.1.0"
