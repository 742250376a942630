"""Tail-biting baker's map analog error-correction code with exact ML decoding."""
from ._accel import backend_name
from .chaos import (
    AffineParams,
    DomainError,
    PlanePoint,
    affine_params,
    baker_forward,
    baker_inverse,
    iterate,
    sign_of_trajectory,
    support_interval,
)
from .codec import (
    CodeParams,
    Codeword,
    DecodeResult,
    ReceivedCodeword,
    closed_form_estimates,
    combine_systematic,
    encode,
    grid_oracle_decode,
    ml_decode,
    objective,
)

__version__ = "0.1.0"
