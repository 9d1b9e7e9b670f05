import toml

import rule184


def test_version():
    assert toml.load("pyproject.toml")["tool"]["poetry"]["version"] == rule184.__version__
