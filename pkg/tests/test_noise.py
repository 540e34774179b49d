"""Stream determinism, known-answer vectors, and distributional checks."""

import numpy as np
import pytest

import philox_reference as ref
from poolvol import DomainError, GridSpec, Role, StreamKey, correlate_market_x, gaussian_increments
from poolvol import _kernels

# Known-answer vectors for the 10-round 4x32 block (counter words, key words,
# expected output words).
KAT = [
    ((0, 0, 0, 0), (0, 0), (0x6627E8D5, 0xE169C58D, 0xBC57AC4C, 0x9B00DBD8)),
    (
        (0xFFFFFFFF, 0xFFFFFFFF, 0xFFFFFFFF, 0xFFFFFFFF),
        (0xFFFFFFFF, 0xFFFFFFFF),
        (0x408F276D, 0x41C83B0E, 0xA20BC7C6, 0x6D5451FD),
    ),
    (
        (0x243F6A88, 0x85A308D3, 0x13198A2E, 0x03707344),
        (0xA4093822, 0x299F31D0),
        (0xD16CFE09, 0x94FDCCEB, 0x5001E420, 0x24126EA1),
    ),
]


class TestGeneratorCore:
    @pytest.mark.parametrize("counter,key,expected", KAT)
    def test_reference_known_answers(self, counter, key, expected):
        assert tuple(ref.philox4x32_10(counter, key)) == expected

    def test_kernel_block_matches_reference(self):
        for seed, index, role, block in [
            (0, 0, 0, 0),
            (123456789, 7, 4, 11),
            (2**64 - 1, 2**40 + 3, 2, 999),
        ]:
            got = tuple(int(v) for v in _kernels.raw_block(seed, index, role, block))
            counter = (block, seed & 0xFFFFFFFF, (seed >> 32) & 0xFFFFFFFF, index >> 32)
            key = (index & 0xFFFFFFFF, role)
            assert got == tuple(ref.philox4x32_10(counter, key))


class TestGaussianIncrements:
    def test_deterministic(self):
        grid = GridSpec(T=1.0, N=1000)
        key = StreamKey(seed=42, role=Role.MARKET_Y, index=3)
        a = gaussian_increments(key, grid)
        b = gaussian_increments(key, grid)
        assert np.array_equal(a, b)

    def test_matches_pure_python_reference(self):
        grid = GridSpec(T=2.0, N=101)
        for seed, role, index in [(1, Role.MARKET_Y, 0), (987654321, Role.FIRM_X, 12345)]:
            got = gaussian_increments(StreamKey(seed, role, index), grid)
            want = ref.stream_increments(grid.N, seed, index, int(role), grid.dt)
            # reference uses scipy's independent inverse CDF: agree to ~1 ulp
            assert np.max(np.abs(got - np.asarray(want))) <= 1e-13

    def test_variance_law_of_large_numbers(self):
        grid = GridSpec(T=100.0, N=1_000_000)  # dt = 1e-4
        dw = gaussian_increments(StreamKey(7, Role.INNER_Y1, 0), grid)
        assert dw.var() == pytest.approx(1e-4, rel=0.01)
        assert abs(dw.mean()) <= 3 * 1e-2 / np.sqrt(grid.N)

    def test_index_independence(self):
        grid = GridSpec(T=100.0, N=1_000_000)
        a = gaussian_increments(StreamKey(7, Role.FIRM_Y, 0), grid)
        b = gaussian_increments(StreamKey(7, Role.FIRM_Y, 1), grid)
        corr = np.corrcoef(a, b)[0, 1]
        assert abs(corr) <= 0.01

    def test_role_independence(self):
        grid = GridSpec(T=10.0, N=200_000)
        n = grid.N
        bound = 3.0 / np.sqrt(n)
        streams = {
            role: gaussian_increments(StreamKey(11, role, 5), grid)
            for role in (Role.MARKET_Y, Role.MARKET_X_ORTH, Role.FIRM_X, Role.FIRM_Y, Role.INNER_Y1)
        }
        roles = list(streams)
        for i, r1 in enumerate(roles):
            for r2 in roles[i + 1 :]:
                corr = np.corrcoef(streams[r1], streams[r2])[0, 1]
                assert abs(corr) <= bound, (r1, r2, corr)

    def test_seed_validation(self):
        with pytest.raises(DomainError):
            StreamKey(seed=-1, role=Role.MARKET_Y)
        with pytest.raises(DomainError):
            StreamKey(seed=2**64, role=Role.MARKET_Y)
        with pytest.raises(DomainError):
            StreamKey(seed=0, role=Role.MARKET_Y, index=-1)


class TestCorrelateMarketX:
    def test_zero_correlation_passthrough(self):
        rng = np.random.default_rng(0)
        w_y = rng.normal(size=100)
        w_x = rng.normal(size=100)
        assert np.array_equal(correlate_market_x(w_y, w_x, 0.0), w_x)

    def test_sample_correlation(self):
        grid = GridSpec(T=100.0, N=1_000_000)
        w_y = gaussian_increments(StreamKey(3, Role.MARKET_Y, 0), grid)
        w_x_orth = gaussian_increments(StreamKey(3, Role.MARKET_X_ORTH, 0), grid)
        w_x = correlate_market_x(w_y, w_x_orth, -0.6)
        assert np.corrcoef(w_y, w_x)[0, 1] == pytest.approx(-0.6, abs=0.01)
        # marginal variance is preserved
        assert w_x.var() == pytest.approx(grid.dt, rel=0.01)

    def test_equal_inputs_arithmetic(self):
        w = np.linspace(-1, 1, 11)
        out = correlate_market_x(w, w, -0.6)
        assert np.allclose(out, 0.2 * w, rtol=1e-15)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            correlate_market_x(np.zeros(3), np.zeros(4), 0.1)

    def test_rho_domain(self):
        with pytest.raises(DomainError):
            correlate_market_x(np.zeros(3), np.zeros(3), 1.0)
