"""Smoke tests for the python bindings. Runnable directly or under pytest."""

import math

import pppcov


def test_gamma_mixture_known_values():
    mix = pppcov.gamma_mixture(kappa=1.0, mu=2, m=1)
    assert len(mix) == 2
    weights = sorted(c[0] for c in mix)
    assert abs(weights[0] - (-0.5)) < 1e-12
    assert abs(weights[1] - 1.5) < 1e-12
    assert abs(sum(w * s * o for (w, s, o) in mix) - 1.0) < 1e-12


def test_kms_pdf_reference_point():
    # Hand-evaluated two-term mixture value at h = 1.
    assert abs(pppcov.kms_pdf(1.0, 1.0, 2, 1) - 0.4905629984539852) < 1e-12


def test_ccdf_basics():
    assert pppcov.kms_ccdf(0.0, 1.0, 1, 1) == 1.0
    assert abs(pppcov.kms_ccdf(math.log(2.0), 1.0, 1, 1) - 0.5) < 1e-12
    assert pppcov.ccdf(0.0, 1.0, 2, 1, sigma_db=4.0) == 1.0


def test_pdf_ghq_matches_exact():
    err = max(
        abs(
            pppcov.pdf_ghq(h, 1.0, 2, 1, sigma_db=4.0)
            - pppcov.pdf_exact(h, 1.0, 2, 1, sigma_db=4.0)
        )
        for h in (0.1, 0.5, 1.0, 2.0)
    )
    assert err < 1e-3


def test_rayleigh_coverage_baseline():
    pc = pppcov.coverage_closed_form(theta=1.0)
    assert abs(pc - 1.0 / (1.0 + math.pi / 4.0)) < 1e-6


def test_closed_form_matches_radial_integral():
    closed = pppcov.coverage_closed_form(theta=1.0, kappa=1.0, mu=2, m=1,
                                         sigma_db=4.0)
    radial = pppcov.coverage_radial_integral(theta=1.0, kappa=1.0, mu=2, m=1,
                                             sigma_db=4.0)
    assert abs(closed - radial) < 1e-8


def test_coverage_monotone_in_theta():
    values = [pppcov.coverage_closed_form(theta=t) for t in (0.1, 1.0, 10.0)]
    assert values[0] > values[1] > values[2]


def test_simulator_agrees_with_closed_form():
    p_hat, half_width, n = pppcov.simulate_coverage(
        theta=1.0, realizations=20000, seed=7
    )
    assert n == 20000
    closed = pppcov.coverage_closed_form(theta=1.0)
    assert abs(p_hat - closed) < max(0.02, 4.0 * half_width)


def test_invalid_alpha_raises():
    try:
        pppcov.coverage_closed_form(theta=1.0, alpha=1.5)
    except ValueError as err:
        assert "path_loss_exponent" in str(err)
    else:
        raise AssertionError("alpha <= 2 must be rejected")


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for test in tests:
        test()
        print(f"ok {test.__name__}")
    print(f"{len(tests)} python smoke tests passed")


if __name__ == "__main__":
    main()
