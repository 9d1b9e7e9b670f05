import pytest

from rule184.components import HeightProfile, SlopeError, TopologyError, common_offset


@pytest.mark.parametrize("heights", [[0, 2], [1, 0, -1, 1], [0, 0, 3]])
def test_steep_heights_are_refused(heights):
    with pytest.raises(SlopeError):
        HeightProfile.from_heights(0, heights)


def test_steep_steps_are_refused():
    with pytest.raises(ValueError):
        HeightProfile(steps=[1, -2])


def test_single_node_profile():
    f = HeightProfile.from_heights(4, [7])
    assert f.last_abscissa == 4
    assert f.heights.tolist() == [7]
    with pytest.raises(TopologyError):
        HeightProfile.from_heights(0, [])


def test_restricted_and_anchored():
    f = HeightProfile.from_heights(-2, [0, 1, 1, 0, -1])
    sub = f.restricted(-1, 1)
    assert sub.abscissas.tolist() == [-1, 0, 1]
    assert sub.heights.tolist() == [1, 1, 0]
    assert f.anchored(0).height_at(0) == 0
    assert f.anchored(2, value=5).heights.tolist() == [6, 7, 7, 6, 5]
    with pytest.raises(TopologyError):
        f.restricted(-3, 0)
    with pytest.raises(TopologyError):
        f.height_at(3)


def test_profile_equality():
    f = HeightProfile.from_heights(0, [0, 1, 2])
    assert f == HeightProfile(steps=[1, 1])
    assert f != f.shifted(1)
    assert len({f, HeightProfile(steps=[1, 1])}) == 1


def test_common_offset_on_overlap():
    f = HeightProfile.from_heights(0, [0, 1, 2, 3])
    g = HeightProfile.from_heights(2, [0, 1, 0])
    assert common_offset(f, g) is None
    assert common_offset(f, f.restricted(1, 2).shifted(4)) == -4
    assert common_offset(f, HeightProfile.from_heights(10, [0])) is None


def test_to_csv():
    text = HeightProfile.from_heights(1, [3, 2]).to_csv()
    assert text.splitlines() == ["k,height", "1,3", "2,2"]
