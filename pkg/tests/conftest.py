"""Shared test helpers: ascii word building and seeded random generators."""

import random

from gridlang.grid import ELEMENT_KINDS, FILTERS, Selector, Word
from gridlang.compose import And, Comparison, Not, Or, Restriction


def W(*rows: str) -> Word:
    """Build a word from ascii rows, '.' marking empty positions.

    W("c.", ".c") is the diagonal two-cell pair of c's.
    """
    cells = [
        (r, c, ch)
        for r, line in enumerate(rows)
        for c, ch in enumerate(line)
        if ch != "."
    ]
    return Word(tuple(cells))


def random_word(rng: random.Random, size: int = 5, letters: str = "ab") -> Word:
    n = rng.randint(1, max(1, size * size // 2))
    cells = {}
    while len(cells) < n:
        cells[(rng.randrange(size), rng.randrange(size))] = rng.choice(letters)
    return Word.from_map(cells)


def random_selector(rng: random.Random) -> Selector:
    return Selector(rng.choice(ELEMENT_KINDS), rng.choice(FILTERS))


def random_restriction(rng: random.Random, depth: int = 2) -> Restriction:
    if depth == 0 or rng.random() < 0.4:
        return Comparison(random_selector(rng), rng.choice("=<>#"), random_selector(rng))
    pick = rng.randrange(4)
    if pick == 0:
        return Not(random_restriction(rng, depth - 1))
    if pick == 1:
        items = tuple(random_restriction(rng, depth - 1) for _ in range(2))
        return And(items)
    if pick == 2:
        items = tuple(random_restriction(rng, depth - 1) for _ in range(2))
        return Or(items)
    return Comparison(random_selector(rng), rng.choice("=<>#"), random_selector(rng))
