import numpy as np
import pytest

from lfmdfn.autodiff.gradcheck import grad_check
from lfmdfn.autodiff.tensor import Tensor
from lfmdfn.core.lightfield import DimensionError, LightField4D
from lfmdfn.model.dynfilter import apply_dynamic_filters


def dynfilter_oracle(filters, lf):
    """Literal per-output-pixel window sum with zero angular padding."""
    nu, nv, rx, ry, d, _ = filters.shape
    _, _, nx, ny = lf.shape
    r = rx // nx
    off = d // 2
    out = np.zeros((nu, nv, rx, ry))
    for u in range(nu):
        for v in range(nv):
            for ox in range(rx):
                for oy in range(ry):
                    x, y = ox // r, oy // r
                    acc = 0.0
                    for i in range(d):
                        for j in range(d):
                            uu, vv = u + i - off, v + j - off
                            if 0 <= uu < nu and 0 <= vv < nv:
                                acc += filters[u, v, ox, oy, i, j] * lf[uu, vv, x, y]
                    out[u, v, ox, oy] = acc
    return out


def _rand_case(rng, nu, nv, nx, ny, d, r):
    f = rng.normal(size=(nu, nv, r * nx, r * ny, d, d))
    x = rng.normal(size=(nu, nv, nx, ny))
    return f, x


class TestForward:
    @pytest.mark.parametrize(
        "nu,nv,nx,ny,d,r",
        [
            (3, 3, 2, 2, 3, 2),
            (2, 3, 3, 2, 5, 1),
            (5, 5, 2, 2, 5, 2),
            (3, 3, 2, 2, 3, 3),
            (7, 7, 2, 2, 5, 2),
            (1, 1, 3, 3, 3, 2),
        ],
    )
    def test_matches_scalar_oracle(self, nu, nv, nx, ny, d, r, rng):
        f, x = _rand_case(rng, nu, nv, nx, ny, d, r)
        got = apply_dynamic_filters(f, x)
        assert got.data.shape == (nu, nv, r * nx, r * ny)
        np.testing.assert_allclose(got.data, dynfilter_oracle(f, x), atol=1e-10)

    def test_center_delta_is_nearest_neighbor(self, rng):
        # A one-hot center tap copies each view's own LR pixel: exact NN
        # upscaling, bit for bit.
        nu, nv, nx, ny, d, r = 4, 4, 3, 3, 5, 2
        f = np.zeros((nu, nv, r * nx, r * ny, d, d), dtype=np.float32)
        f[:, :, :, :, d // 2, d // 2] = 1.0
        x = rng.random((nu, nv, nx, ny), dtype=np.float32)
        out = apply_dynamic_filters(f, x)
        np.testing.assert_array_equal(out.data, x.repeat(r, axis=2).repeat(r, axis=3))

    def test_off_center_delta_shifts_views(self, rng):
        # One-hot at tap (i, j) reads from view (u+i-d//2, v+j-d//2).
        nu, nv, nx, ny, d, r = 3, 3, 2, 2, 3, 1
        f = np.zeros((nu, nv, nx, ny, d, d))
        f[:, :, :, :, 2, 1] = 1.0  # u offset +1, v offset 0
        x = rng.random((nu, nv, nx, ny))
        out = apply_dynamic_filters(f, x).data
        np.testing.assert_array_equal(out[:-1], x[1:])
        np.testing.assert_array_equal(out[-1], np.zeros((nv, nx, ny)))

    def test_normalized_filters_preserve_constants_in_interior(self, rng):
        # Where the window stays inside the grid, weights summing to one
        # reproduce a constant field exactly (up to float accumulation).
        nu = nv = 7
        d, r = 5, 2
        logits = rng.normal(size=(nu, nv, 8, 8, d * d))
        w = np.exp(logits) / np.exp(logits).sum(-1, keepdims=True)
        f = w.reshape(nu, nv, 8, 8, d, d)
        x = np.full((nu, nv, 4, 4), 0.625)
        out = apply_dynamic_filters(f, x).data
        interior = out[2:5, 2:5]
        np.testing.assert_allclose(interior, 0.625, atol=1e-12)
        # Border views lose mass to the zero padding.
        assert out[0, 0].max() < 0.625

    def test_lightfield_and_tensor_inputs(self, rng):
        f, x = _rand_case(rng, 3, 3, 2, 2, 3, 2)
        a = apply_dynamic_filters(Tensor(f), LightField4D(x[..., None])).data
        b = apply_dynamic_filters(f, x).data
        np.testing.assert_array_equal(a, b)

    def test_scale_one_supported(self, rng):
        f, x = _rand_case(rng, 3, 3, 4, 4, 3, 1)
        out = apply_dynamic_filters(f, x)
        assert out.data.shape == x.shape


class TestBackward:
    def test_grad_filters(self, rng):
        f, x = _rand_case(rng, 3, 3, 2, 2, 3, 2)
        mult = Tensor(rng.normal(size=(3, 3, 4, 4)))
        ft = Tensor(f, requires_grad=True)
        err = grad_check(lambda t: (apply_dynamic_filters(t, x) * mult).sum(), ft)
        assert err < 1e-4

    def test_grad_lightfield(self, rng):
        f, x = _rand_case(rng, 3, 3, 2, 2, 3, 2)
        mult = Tensor(rng.normal(size=(3, 3, 4, 4)))
        xt = Tensor(x, requires_grad=True)
        err = grad_check(lambda t: (apply_dynamic_filters(Tensor(f), t) * mult).sum(), xt)
        assert err < 1e-4


class TestValidation:
    def test_angular_mismatch(self, rng):
        f = rng.normal(size=(3, 3, 4, 4, 3, 3))
        x = rng.normal(size=(4, 3, 2, 2))
        with pytest.raises(DimensionError):
            apply_dynamic_filters(f, x)

    def test_even_taps_rejected(self, rng):
        f = rng.normal(size=(3, 3, 4, 4, 4, 4))
        x = rng.normal(size=(3, 3, 2, 2))
        with pytest.raises(DimensionError):
            apply_dynamic_filters(f, x)

    def test_nonsquare_taps_rejected(self, rng):
        f = rng.normal(size=(3, 3, 4, 4, 3, 5))
        x = rng.normal(size=(3, 3, 2, 2))
        with pytest.raises(DimensionError):
            apply_dynamic_filters(f, x)

    def test_indivisible_spatial(self, rng):
        f = rng.normal(size=(3, 3, 5, 4, 3, 3))
        x = rng.normal(size=(3, 3, 2, 2))
        with pytest.raises(DimensionError):
            apply_dynamic_filters(f, x)

    def test_anisotropic_scale_rejected(self, rng):
        f = rng.normal(size=(3, 3, 4, 6, 3, 3))
        x = rng.normal(size=(3, 3, 2, 2))
        with pytest.raises(DimensionError):
            apply_dynamic_filters(f, x)

    def test_multichannel_lf_rejected(self, rng):
        f = rng.normal(size=(3, 3, 4, 4, 3, 3))
        lf = LightField4D(rng.random((3, 3, 2, 2, 3), dtype=np.float32))
        with pytest.raises(DimensionError):
            apply_dynamic_filters(f, lf)

    def test_wrong_rank_rejected(self, rng):
        with pytest.raises(DimensionError):
            apply_dynamic_filters(rng.normal(size=(3, 3, 4, 4, 3)), rng.normal(size=(3, 3, 2, 2)))
