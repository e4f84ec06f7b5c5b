"""Shared builders for the test suite."""

from fractions import Fraction

from mfas_cover.constants import SCALE
from mfas_cover.gen import GenSpec, gen_hemimetric
from mfas_cover.instance import Instance

# w(0,1)=1 w(1,0)=2 w(1,2)=1 w(2,1)=2 w(0,2)=2 w(2,0)=1; best order (0,1,2) costs 4
K3_ROWS = [
    [0, 1, 2],
    [2, 0, 1],
    [1, 2, 0],
]


def k3(pairs=()) -> Instance:
    return Instance.from_weights(K3_ROWS, pairs)


def two_vertex(w01, w10) -> Instance:
    return Instance.from_weights([[0, w01], [w10, 0]])


def units(value) -> int:
    """Real units to nanos."""
    return int(Fraction(value) * SCALE)


def arcs(*pairs):
    return frozenset(pairs)


def hemimetric_corpus(count, sizes, densities=(0, Fraction(1, 5), Fraction(1, 2)), seed_base=0):
    """``count`` seeded hemimetric instances cycling through sizes and densities."""
    corpus = []
    for index in range(count):
        n = sizes[index % len(sizes)]
        density = Fraction(densities[(index // len(sizes)) % len(densities)])
        spec = GenSpec(n=n, seed=seed_base + index, poset_density=density, weight_range=(0, 10 * SCALE))
        corpus.append(gen_hemimetric(spec))
    return corpus
