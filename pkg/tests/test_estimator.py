import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from degen_kpp import DomainError, TravellingWaveFamily


@pytest.fixture(scope="module")
def family():
    return TravellingWaveFamily(c=2.1).fit()


def test_params_roundtrip():
    est = TravellingWaveFamily(c=2.5, samples=400)
    assert est.get_params() == {"c": 2.5, "tol": None, "samples": 400}
    assert clone(est).set_params(c=3.0).c == 3.0


def test_not_fitted():
    with pytest.raises(NotFittedError):
        TravellingWaveFamily().predict([0.1])


def test_fit_attributes(family, table):
    assert family.lambda_minus_ * family.lambda_plus_ == pytest.approx(1.0)
    assert family.thresholds_["alpha_max"] == table.alpha_max


def test_predict(family, table):
    X = [0.5 * table.h0_half, table.h0_half, 0.0141, table.bell_top, 1.0, 2.0]
    tags = family.predict(X).tolist()
    assert tags == ["BelowSmall", "NonSaturated", "SaturatedA", "SaturatedB", "SaturatedC",
                    "AboveMax"]


def test_profiles(family):
    assert not family.profile("small").saturated
    assert family.profile("large").saturated
    assert family.profile(0.5).kind.saturated
    with pytest.raises(DomainError):
        family.profile(2.0)


def test_fit_rejects_small_speed():
    with pytest.raises(DomainError):
        TravellingWaveFamily(c=1.5).fit()


def test_predict_rejects_bad_input(family):
    with pytest.raises(DomainError):
        family.predict([np.nan])
