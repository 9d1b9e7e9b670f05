import re

import numpy as np

from .errors import Rule184Error
from .lattice import BaConfig, Ca184Config, Lattice, Model
from .path import Clock, SecondClassPath
from .profile import HeightProfile
from .topology import Topology

TRIT_CHARS = {1: "+", -1: "-", 0: "0"}
CHAR_TRITS = {v: k for k, v in TRIT_CHARS.items()}

config_pattern = re.compile(
    r"""
    ^(?P<model>ca184|ba):
    (?:
        RING:(?P<size>\d+)
        |
        OPEN(?P<half>@HALF)?:(?P<lo>-?\d+)\.\.(?P<hi>-?\d+)
    ):
    (?P<cells>[01+\-]*)$
    """,
    re.X,
)

path_pattern = re.compile(
    r"""
    ^path:
    (?P<clock>HALF|WHOLE):
    (?P<t2>-?\d+):
    (?P<p2>-?\d+):
    (?P<steps>[+\-]*)$
    """,
    re.X,
)


class CodecError(Rule184Error, ValueError):
    pass


def serialize_config(config: Lattice) -> str:
    """One-line text form of a configuration.

    Examples:
        >>> serialize_config(Ca184Config(topology=Topology.ring(5), cells=[1, 0, 1, 1, 0]))
        'ca184:RING:5:10110'
        >>> serialize_config(BaConfig(topology=Topology.window(3, lo=-1), cells=[1, 0, -1]))
        'ba:OPEN:-1..1:+0-'
    """
    top = config.topology
    if top.is_ring:
        where = f"RING:{top.extent}"
    else:
        half = "@HALF" if getattr(config, "half", False) else ""
        where = f"OPEN{half}:{top.lo}..{top.hi}"
    return f"{config.model.value}:{where}:{cells_to_text(config.cells, config.model)}"


def parse_config(text: str) -> Lattice:
    """Inverse of `serialize_config`.

    Examples:
        >>> parse_config("ba:OPEN:-1..1:+0-").cells.tolist()
        [1, 0, -1]
        >>> parse_config("ca184:RING:3:2")
        Traceback (most recent call last):
        ...
        rule184.components.codec.CodecError: Not a configuration: 'ca184:RING:3:2'
    """
    m = config_pattern.match(text.strip())
    if not m:
        raise CodecError(f"Not a configuration: {text!r}")
    if m.group("size"):
        topology = Topology.ring(int(m.group("size")))
    else:
        lo, hi = int(m.group("lo")), int(m.group("hi"))
        topology = Topology.window(hi - lo + 1, lo=lo)
    body = m.group("cells")
    if m.group("model") == Model.CA184.value:
        if not set(body) <= {"0", "1"}:
            raise CodecError(f"CA 184 cells are bits: {body!r}")
        return Ca184Config(topology=topology, cells=[int(c) for c in body])
    if "1" in body:
        raise CodecError(f"Trit cells use '+', '-' and '0': {body!r}")
    return BaConfig(
        topology=topology,
        cells=[CHAR_TRITS[c] for c in body],
        half=bool(m.group("half")),
    )


def serialize_path(path: SecondClassPath) -> str:
    """
    Examples:
        >>> serialize_path(SecondClassPath(clock="HALF", start_time2=0, start_pos2=2, steps=(-1, 1)))
        'path:HALF:0:2:-+'
    """
    steps = "".join("+" if s > 0 else "-" for s in path.steps)
    return f"path:{path.clock}:{path.start_time2}:{path.start_pos2}:{steps}"


def parse_path(text: str) -> SecondClassPath:
    m = path_pattern.match(text.strip())
    if not m:
        raise CodecError(f"Not a path: {text!r}")
    return SecondClassPath(
        clock=Clock(m.group("clock")),
        start_time2=int(m.group("t2")),
        start_pos2=int(m.group("p2")),
        steps=tuple(1 if c == "+" else -1 for c in m.group("steps")),
    )


def cells_to_text(cells: np.ndarray, model: Model) -> str:
    if model == Model.CA184:
        return "".join("1" if c else "0" for c in cells)
    return "".join(TRIT_CHARS[int(c)] for c in cells)


def profile_to_csv(profile: HeightProfile) -> str:
    """
    Examples:
        >>> print(profile_to_csv(HeightProfile.from_heights(-1, [0, 1, 1])), end="")
        k,height
        -1,0
        0,1
        1,1
    """
    return profile.to_csv()
