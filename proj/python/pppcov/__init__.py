"""Coverage probability of Poisson cellular networks under double shadowed
(lognormal x kappa-mu shadowed) fading.

Thin wrapper over the compiled _pppcov extension. Thresholds are linear
(not dB) throughout; fading parameters mu and m are positive integers.
"""

from ._pppcov import (
    ccdf,
    coverage_closed_form,
    coverage_radial_integral,
    e_h0,
    e_hq,
    gamma_mixture,
    kms_ccdf,
    kms_pdf,
    pdf_exact,
    pdf_ghq,
    simulate_coverage,
)

__all__ = [
    "ccdf",
    "coverage_closed_form",
    "coverage_radial_integral",
    "e_h0",
    "e_hq",
    "gamma_mixture",
    "kms_ccdf",
    "kms_pdf",
    "pdf_exact",
    "pdf_ghq",
    "simulate_coverage",
]
