"""Neighbourhood `(left, centre, right)` to the next centre bit. A particle
hops right into an empty site; a particle with an occupied right neighbour stays.
Reading the outputs from `111` down to `000` as a binary number gives 184.

Examples:
    >>> int("".join(str(v) for v in RULE_184.values()), 2) == WOLFRAM_NUMBER
    True
"""

WOLFRAM_NUMBER = 184

RULE_184: dict[tuple[int, int, int], int] = {
    (1, 1, 1): 1,
    (1, 1, 0): 0,
    (1, 0, 1): 1,
    (1, 0, 0): 1,
    (0, 1, 1): 1,
    (0, 1, 0): 0,
    (0, 0, 1): 0,
    (0, 0, 0): 0,
}
