import pytest

from rule184.components import InvalidSpecError, stream, stream_independence
from rule184.components.rng import label_key


def test_streams_are_reproducible():
    a = stream(1, 2, "flux").random(8)
    b = stream(1, 2, "flux").random(8)
    assert (a == b).all()


@pytest.mark.parametrize("other", [(2, 2, "flux"), (1, 3, "flux"), (1, 2, "init")])
def test_any_key_change_spawns_a_new_stream(other):
    assert (stream(1, 2, "flux").random(8) != stream(*other).random(8)).any()


def test_labels_are_slugified():
    assert label_key("Init BA") == label_key("init-ba")
    assert label_key("init ba") != label_key("init ca")


def test_negative_seed():
    with pytest.raises(InvalidSpecError):
        stream(-1)


def test_labelled_streams_look_independent():
    assert stream_independence(184, "init", "flux", samples=20000) > 1e-6
