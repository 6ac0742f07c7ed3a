"""Metaplectic time-frequency representations and localization operators on sampled grids."""
from .errors import *  # noqa: F401,F403
from .grid import (
    GridSpec,
    SampledField,
    SampledFunction,
    field_gaussian,
    fourier,
    gaussian,
    inner_product,
    inverse_fourier,
)
from .sympmat import (
    A_FT2,
    A_ST,
    A_half,
    A_tau,
    D_E,
    D_S,
    J,
    SymplecticMatrix,
    V_C,
    factor_into_generators,
    identity,
    is_covariant,
    satisfies_block_conditions,
    symplectic_inverse,
)
from .metaplectic import MetaplecticOperator, apply_metaplectic, apply_metaplectic_inverse
from .tfr import stft, tau_wigner, wa, wigner
from .quant import OperatorMatrix, op_a, op_tau, op_weyl
from .locop import a_loc, adjoint_a_loc, classical_loc
from .modspace import mod_norm, schatten_norm, symbol_mod_norm

__version__ = "0.1.0"
