import math
from fractions import Fraction

import pytest

from rule184 import __version__
from rule184.components import StatReport


def test_from_values():
    r = StatReport.from_values("x", [1, 2, 3], reference=Fraction(3, 8))
    assert r.estimate == 2.0
    assert r.stderr == pytest.approx(1 / math.sqrt(3))
    assert r.samples == 3
    assert r.exact == "3/8"
    assert r.reference == 0.375
    assert r.deviation == pytest.approx(1.625)
    assert not r.within(2)


def test_single_value_has_no_spread():
    r = StatReport.from_values("x", [0.25])
    assert r.stderr == 0.0
    assert r.within()
    assert r.deviation is None


def test_no_samples():
    with pytest.raises(ValueError):
        StatReport(estimator="x", estimate=0.0, samples=0)


def test_proportion_row():
    r = StatReport.from_proportion("hit", hits=1, count=4, reference=0.25)
    assert r.within(0)
    row = r.as_row()
    assert row["estimate"] == "0.25"
    assert row["reference"] == "0.25"
    assert row["exact"] == ""
    assert row["version"] == __version__
