import numpy as np
import pytest
from numpy.testing import assert_allclose

from gtphd.estimate import extent_width, extract
from gtphd.models import GgiwComponent, PhdMixture, TrajectoryGaussian


def _mix():
    p = [TrajectoryGaussian(w, 1, np.full(8, i), np.eye(8)) for i, w in enumerate([0.9, 0.3, 0.6])]
    e = [GgiwComponent(0.8, 2, np.ones(4), np.eye(4), a=20, b=2, v=16, V=np.diag([10.0, 2.0]))]
    return PhdMixture(2, point=p, extended=e)


def test_round_rule():
    est = extract(_mix())
    # total mass 2.6 -> 3 estimates, heaviest first
    assert [e.weight for e in est] == [0.9, 0.8, 0.6]
    assert [e.kind for e in est] == ["point", "extended", "point"]
    assert est[1].rate == 10.0
    assert_allclose(est[1].extent, np.diag([1.0, 0.2]))
    assert est[0].states.shape == (2, 4) and est[0].end_time == 2


def test_threshold_rule():
    est = extract(_mix(), "threshold", 0.5)
    assert len(est) == 3
    assert len(extract(_mix(), "threshold", 0.85)) == 1


def test_empty_and_unknown():
    assert extract(PhdMixture(0)) == []
    with pytest.raises(ValueError):
        extract(_mix(), "mode")


def test_half_mass_rounds_up():
    mix = PhdMixture(1, point=[TrajectoryGaussian(0.5, 1, np.zeros(4), np.eye(4))])
    assert len(extract(mix)) == 1


def test_extent_width():
    assert_allclose(extent_width(np.diag([0.25, 4.0])), (4.0, 1.0))
