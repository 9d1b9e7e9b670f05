import pytest

from rule184.components import atomic_write, chunked


@pytest.mark.parametrize(
    "total, size, expected",
    [
        (0, 3, []),
        (3, 3, [(0, 3)]),
        (7, 3, [(0, 3), (3, 3), (6, 1)]),
    ],
)
def test_chunked(total, size, expected):
    assert list(chunked(total, size)) == expected


def test_atomic_write(tmp_path):
    target = tmp_path / "nested" / "out.csv"
    atomic_write(target, "a,b\n")
    atomic_write(target, "c,d\n")
    assert target.read_text() == "c,d\n"
    assert [p.name for p in target.parent.iterdir()] == ["out.csv"]
