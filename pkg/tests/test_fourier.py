import cmath

import numpy as np
import pytest

from bellccp import OmegaFunction, convex_weights, dft_power, linear_detect
from bellccp.functional import omega


def brute_transform(bf, l, r):
    """Direct summation oracle for the transform of the r-th power."""
    w = cmath.exp(2j * cmath.pi / bf.d)
    return sum(w ** (r * bf.n[x0]) * w ** (-l * x0) for x0 in range(bf.d)) / bf.d


def test_affine_function_single_coefficient():
    bf = OmegaFunction(4, tuple((x0 + 2) % 4 for x0 in range(4)))
    assert dft_power(bf, 1, 1) == pytest.approx(-1.0, abs=1e-14)  # omega^2 for d=4
    for l in (0, 2, 3):
        assert abs(dft_power(bf, l, 1)) < 1e-14


def test_constant_function_transform():
    bf = OmegaFunction(3, (0, 0, 0))
    assert dft_power(bf, 0, 1) == pytest.approx(1.0, abs=1e-14)
    assert abs(dft_power(bf, 1, 1)) < 1e-14
    assert abs(dft_power(bf, 2, 1)) < 1e-14


def test_nonlinear_example_d3():
    # n = (0, 0, 1): exponents n(x0) - x0 are {0, 2, 2}
    bf = OmegaFunction(3, (0, 0, 1))
    w = omega(3)
    expected = (1 + 2 * w**2) / 3
    assert dft_power(bf, 1, 1) == pytest.approx(expected, abs=1e-14)
    assert dft_power(bf, 1, 1) == pytest.approx(brute_transform(bf, 1, 1), abs=1e-14)


def test_convex_weights_examples():
    assert np.allclose(convex_weights(OmegaFunction(3, (0, 0, 1))), [1 / 3, 0, 2 / 3])
    assert np.allclose(convex_weights(OmegaFunction(4, tuple((x0 + 2) % 4 for x0 in range(4)))),
                       [0, 0, 1, 0])
    assert np.allclose(convex_weights(OmegaFunction(2, (0, 0))), [0.5, 0.5])


def test_linear_detect_examples():
    assert linear_detect(OmegaFunction(5, tuple((2 * x0 + 3) % 5 for x0 in range(5)))) == (2, 3)
    assert linear_detect(OmegaFunction(3, (0, 0, 1))) is None
    assert linear_detect(OmegaFunction(2, (1, 0))) == (1, 1)


def test_out_of_range_arguments():
    bf = OmegaFunction(3, (0, 1, 2))
    with pytest.raises(ValueError):
        dft_power(bf, 3, 1)
    with pytest.raises(ValueError):
        dft_power(bf, 0, 0)
    with pytest.raises(ValueError):
        OmegaFunction(3, (0, 1))
    with pytest.raises(ValueError):
        OmegaFunction(3, (0, 1, 3))


def random_omega(d, rng):
    return OmegaFunction(d, tuple(int(v) for v in rng.integers(0, d, size=d)))


def test_power_transform_equals_weighted_roots():
    # K(r, B^r) = sum_nu lambda_nu omega^(r nu) for every power r
    rng = np.random.default_rng(2024)
    for d in range(2, 8):
        w = omega(d)
        for _ in range(100):
            bf = random_omega(d, rng)
            lam = convex_weights(bf)
            for r in range(1, d):
                expected = sum(lam[nu] * w ** (r * nu) for nu in range(d))
                assert abs(dft_power(bf, r, r) - expected) < 1e-12


def test_affine_iff_single_unit_coefficient():
    # a single nonzero first-order coefficient (necessarily of unit modulus,
    # by Parseval) happens exactly for affine exponent functions, with the
    # coefficient sitting at l = s and equal to omega^t
    rng = np.random.default_rng(99)
    for d in range(2, 8):
        w = omega(d)
        for _ in range(60):
            bf = random_omega(d, rng)
            coeffs = [dft_power(bf, l, 1) for l in range(d)]
            support = [l for l in range(d) if abs(coeffs[l]) > 1e-9]
            detected = linear_detect(bf)
            if detected is not None:
                s, t = detected
                assert support == [s]
                assert abs(abs(coeffs[s]) - 1.0) < 1e-12
                assert coeffs[s] == pytest.approx(w**t, abs=1e-12)
            else:
                assert len(support) != 1


def test_weights_are_multiples_of_inverse_d():
    rng = np.random.default_rng(7)
    for d in range(2, 8):
        for _ in range(50):
            lam = convex_weights(random_omega(d, rng))
            assert lam.sum() == pytest.approx(1.0, abs=1e-15)
            assert np.all(lam >= 0)
            assert np.allclose(lam * d, np.round(lam * d), atol=1e-12)
