"""
digitdim - certified bounds on the Fourier l1 dimension of missing-digit
measures.

    >>> import digitdim
    >>> sys5 = digitdim.make_one_missing(5, 0)
    >>> cert = digitdim.verify_lower(sys5, 2, "1e-5", "1/2")
    >>> cert.verdict
    <Verdict.PASS: 'PASS'>
"""

from ._version import __version__
from .analytic import (
    AnalyticBound,
    expsum_bound,
    lower_bound_ap,
    lower_bound_one_missing,
    smallest_base,
)
from .certify import (
    BoundBracket,
    Budget,
    Certificate,
    RefineStatus,
    SlackPolicy,
    Verdict,
    bound_bracket,
    empirical_kappa1_integral,
    grid_extrema,
    induction_sum_check,
    lipschitz_bound,
    refine_dimension,
    verify_lower,
    verify_upper,
)
from .config import Settings, load_settings
from .consequences import (
    BDVerdict,
    ExponentReport,
    bd_check,
    bd_tau_factory,
    counting_exponent,
    exponent_report,
    intrinsic_threshold,
    rho_counting,
    tau_for_bd,
)
from .digitmeasure import (
    APDigitSpec,
    DigitSystem,
    cocycle_product,
    empirical_kappa1,
    fourier_coefficient_truncated,
    grid_sum,
    hausdorff_dimension,
    make_ap,
    make_one_missing,
    make_uniform,
    mirror,
    parse_system,
    power_system,
    symbol_modulus,
)
from .enclosure import (
    Comparison,
    ComplexBox,
    DecimalBounds,
    Enclosure,
    arith,
    compare_threshold,
    unit_circle,
)
from .errors import (
    CertificateError,
    DigitDimError,
    DomainError,
    EnumerationLimitError,
    NotFoundError,
    ParameterError,
    SystemSpecError,
    UnsupportedError,
)
from .grid import GridSpec
from .log import get_log_level, set_log_level
