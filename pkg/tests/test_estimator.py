import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from lfmdfn.core.lightfield import LightField4D
from lfmdfn.estimator import MDFNSuperResolver
from lfmdfn.kvconfig import ConfigError

from lfsynth import synth_lf

TINY_KW = dict(n=2, c=8, d=3, r=2, iterations=3, batch_size=2, crop_size=8,
               lr=1e-3, augment=False, seed=5, deterministic=True)


def _fit_tiny(**overrides):
    kw = dict(TINY_KW)
    kw.update(overrides)
    est = MDFNSuperResolver(**kw)
    fields = [synth_lf(u=7, v=7, x=32, y=32, seed=s) for s in (0, 1)]
    return est.fit(fields), fields


class TestSklearnProtocol:
    def test_get_params_round_trip(self):
        est = MDFNSuperResolver(n=3, c=12, lr=5e-4)
        params = est.get_params()
        assert params["n"] == 3 and params["c"] == 12 and params["lr"] == 5e-4
        est2 = MDFNSuperResolver(**params)
        assert est2.get_params() == params

    def test_clone(self):
        est = MDFNSuperResolver(**TINY_KW)
        cl = clone(est)
        assert cl.get_params() == est.get_params()

    def test_set_params(self):
        est = MDFNSuperResolver()
        est.set_params(n=2, c=8)
        assert est.n == 2 and est.c == 8

    def test_unfitted_predict_raises(self):
        with pytest.raises(NotFittedError):
            MDFNSuperResolver().predict(synth_lf(u=7, v=7, x=8, y=8, seed=0))

    def test_invalid_config_rejected_at_fit(self):
        est = MDFNSuperResolver(**{**TINY_KW, "r": 3})
        with pytest.raises(ConfigError):
            est.fit([synth_lf(u=7, v=7, x=16, y=16, seed=0)])


class TestFit:
    def test_fit_sets_attributes(self):
        est, _ = _fit_tiny()
        assert est.n_iter_ == 3
        assert len(est.loss_history_) == 3
        assert all(np.isfinite(v) for v in est.loss_history_)
        assert est.param_count_ == est.params_.count()
        assert est.opt_state_.step == 3

    def test_fit_deterministic(self):
        a, _ = _fit_tiny()
        b, _ = _fit_tiny()
        assert a.loss_history_ == b.loss_history_
        for name in a.params_.names():
            np.testing.assert_array_equal(a.params_[name].data, b.params_[name].data)

    def test_fit_from_dataset_root(self, tmp_path, lf_cache):
        from lfmdfn.core.io import save_lf

        root = tmp_path / "data"
        root.mkdir()
        for s in range(2):
            save_lf(synth_lf(u=7, v=7, x=32, y=32, seed=s), root / f"lf{s}.lf4d")
        est = MDFNSuperResolver(**TINY_KW)
        est.fit(root)
        assert est.n_iter_ == 3

    def test_fit_accepts_single_field_and_arrays(self):
        est = MDFNSuperResolver(**TINY_KW)
        est.fit(synth_lf(u=7, v=7, x=32, y=32, seed=0))
        assert hasattr(est, "params_")
        est2 = MDFNSuperResolver(**TINY_KW)
        est2.fit(synth_lf(u=7, v=7, x=32, y=32, seed=0).data)
        assert hasattr(est2, "params_")


class TestPredict:
    def test_single_in_single_out(self):
        est, _ = _fit_tiny()
        lr = synth_lf(u=7, v=7, x=8, y=8, seed=3)
        out = est.predict(lr)
        assert isinstance(out, LightField4D)
        assert out.shape == (7, 7, 16, 16, 1)

    def test_list_in_list_out(self):
        est, _ = _fit_tiny()
        outs = est.predict([synth_lf(u=7, v=7, x=8, y=8, seed=s) for s in (3, 4)])
        assert isinstance(outs, list) and len(outs) == 2
        assert all(o.shape == (7, 7, 16, 16, 1) for o in outs)

    def test_rgb_input_gives_rgb_output(self):
        est, _ = _fit_tiny()
        rgb = synth_lf(u=7, v=7, x=8, y=8, seed=3, channels=3)
        out = est.predict(rgb)
        assert out.shape == (7, 7, 16, 16, 3)
        assert np.isfinite(out.data).all()

    def test_rgb_luma_agrees_with_gray_path(self):
        from lfmdfn.core.color import rgb_to_ycbcr

        est, _ = _fit_tiny()
        rgb = synth_lf(u=7, v=7, x=8, y=8, seed=3, channels=3)
        gray = LightField4D(rgb_to_ycbcr(rgb.data)[..., :1])
        sr_rgb = est.predict(rgb)
        sr_gray = est.predict(gray)
        np.testing.assert_allclose(
            rgb_to_ycbcr(sr_rgb.data)[..., 0], sr_gray.data[..., 0], atol=2e-5
        )

    def test_transform_is_predict(self):
        est, _ = _fit_tiny()
        lr = synth_lf(u=7, v=7, x=8, y=8, seed=3)
        np.testing.assert_array_equal(est.transform(lr).data, est.predict(lr).data)

    def test_predict_is_repeatable(self):
        est, _ = _fit_tiny()
        lr = synth_lf(u=7, v=7, x=8, y=8, seed=3)
        np.testing.assert_array_equal(est.predict(lr).data, est.predict(lr).data)


class TestScore:
    def test_score_recomputes_as_mean_psnr(self):
        from lfmdfn.core.metrics import lf_metrics
        from lfmdfn.training.data import make_pair

        est, fields = _fit_tiny()
        s = est.score(fields)
        assert np.isfinite(s)
        expect = 0.0
        for lf in fields:
            lr_lf, hr_lf = make_pair(lf, 2)
            p, _ = lf_metrics(hr_lf, est.predict(lr_lf))
            expect += p
        assert s == pytest.approx(expect / len(fields), abs=1e-9)


class TestPersistence:
    def test_save_and_reload_predicts_identically(self, tmp_path):
        est, _ = _fit_tiny()
        p = tmp_path / "model.mdfn"
        est.save(p)
        est2 = MDFNSuperResolver.from_checkpoint(p)
        assert est2.n == est.n and est2.c == est.c and est2.r == est.r
        assert est2.n_iter_ == 3
        lr = synth_lf(u=7, v=7, x=8, y=8, seed=3)
        np.testing.assert_array_equal(est2.predict(lr).data, est.predict(lr).data)

    def test_unfitted_save_raises(self, tmp_path):
        with pytest.raises(NotFittedError):
            MDFNSuperResolver().save(tmp_path / "m.mdfn")
