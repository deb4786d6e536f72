"""Random k-out subgraphs of a host graph.

Two ways to get choices:

* :func:`sample` / :func:`sample_colored` draw every vertex's choices at once
  and return an immutable :class:`KOutSample`.
* :class:`ChoiceOracle` reveals choices one at a time, which is what the
  search procedures need.  A finished oracle can be frozen into a sample.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

import numpy as np

from .errors import BadMultiplicity, BudgetExhausted, DegreeTooSmall, SamplingError
from .graph import Graph

# color ids; a sample's ColorSpec decides which ones are in play
GREEN, BLUE = 0, 1
LIGHT_RED, DARK_RED, LIGHT_BLUE, DARK_BLUE = 0, 1, 2, 3
FOUR_COLOR_NAMES = {
    LIGHT_RED: "light-red",
    DARK_RED: "dark-red",
    LIGHT_BLUE: "light-blue",
    DARK_BLUE: "dark-blue",
}


class Mode(str, Enum):
    WITH_REPLACEMENT = "with"
    WITHOUT_REPLACEMENT = "without"

    @classmethod
    def parse(cls, value: str | Mode) -> Mode:
        if isinstance(value, Mode):
            return value
        aliases = {
            "with": cls.WITH_REPLACEMENT,
            "with_replacement": cls.WITH_REPLACEMENT,
            "without": cls.WITHOUT_REPLACEMENT,
            "without_replacement": cls.WITHOUT_REPLACEMENT,
        }
        try:
            return aliases[value.lower().replace("-", "_")]
        except KeyError:
            raise ValueError(f"unknown sampling mode {value!r}") from None


@dataclass(frozen=True)
class ColorSpec:
    """Ordered ``(color_id, multiplicity)`` pairs."""

    entries: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        ids = [c for c, _ in self.entries]
        if len(set(ids)) != len(ids):
            raise BadMultiplicity(f"duplicate color ids in {self.entries}")
        for c, k in self.entries:
            if k < 1:
                raise BadMultiplicity(f"color {c} has multiplicity {k} < 1")

    @classmethod
    def single(cls, k: int, color: int = 0) -> ColorSpec:
        return cls(((color, k),))

    @classmethod
    def four(cls, k: int) -> ColorSpec:
        return cls(((LIGHT_RED, k), (DARK_RED, k), (LIGHT_BLUE, k), (DARK_BLUE, k)))

    @property
    def ids(self) -> tuple[int, ...]:
        return tuple(c for c, _ in self.entries)

    def multiplicity(self, color: int) -> int:
        for c, k in self.entries:
            if c == color:
                return k
        raise KeyError(f"color {color} not in spec")

    @property
    def total(self) -> int:
        return sum(k for _, k in self.entries)


@dataclass(frozen=True, eq=False)
class KOutSample:
    """Per-vertex, per-color choices; ``choices[color]`` is an ``(n, k_color)`` int array."""

    host: Graph
    mode: Mode
    spec: ColorSpec
    choices: dict[int, np.ndarray] = field(repr=False)

    def __post_init__(self) -> None:
        n = self.host.n
        if set(self.choices) != set(self.spec.ids):
            raise SamplingError("choice colors do not match the color spec")
        for c, k in self.spec.entries:
            arr = self.choices[c]
            if arr.shape != (n, k):
                raise SamplingError(f"color {c}: expected shape {(n, k)}, got {arr.shape}")
            if n and k:
                src = np.repeat(np.arange(n), k)
                if not self.host.has_arcs(src, arr.reshape(-1)).all():
                    bad = int(np.flatnonzero(~self.host.has_arcs(src, arr.reshape(-1)))[0])
                    raise SamplingError(f"choice {bad // k}->{arr.reshape(-1)[bad]} is not a host edge")
                if self.mode is Mode.WITHOUT_REPLACEMENT and k > 1:
                    srt = np.sort(arr, axis=1)
                    if (srt[:, 1:] == srt[:, :-1]).any():
                        raise SamplingError(f"color {c}: repeated choice in without-replacement mode")
            arr.setflags(write=False)

    @property
    def n(self) -> int:
        return self.host.n

    def arcs(self, colors: Iterable[int] | None = None) -> list[tuple[int, int]]:
        """All chosen ``(v, w)`` arcs, in vertex order then color order."""
        use = self._filter(colors)
        out = []
        for v in range(self.n):
            for c in use:
                out.extend((v, int(w)) for w in self.choices[c][v])
        return out

    def out_choices(self, v: int, colors: Iterable[int] | None = None) -> list[int]:
        return [int(w) for c in self._filter(colors) for w in self.choices[c][v]]

    def _filter(self, colors: Iterable[int] | None) -> list[int]:
        if colors is None:
            return list(self.spec.ids)
        wanted = set(colors)
        return [c for c in self.spec.ids if c in wanted]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "mode": self.mode.value,
            "colors": [{"id": c, "k": k} for c, k in self.spec.entries],
            "choices": [
                [[int(w) for w in self.choices[c][v]] for c in self.spec.ids] for v in range(self.n)
            ],
        }

    @classmethod
    def from_json(cls, host: Graph, data: dict) -> KOutSample:
        spec = ColorSpec(tuple((int(e["id"]), int(e["k"])) for e in data["colors"]))
        if int(data.get("n", host.n)) != host.n:
            raise SamplingError(f"sample is for n={data['n']}, host has n={host.n}")
        rows = data["choices"]
        if len(rows) != host.n:
            raise SamplingError("choices must have one entry per vertex")
        choices = {}
        for i, (c, k) in enumerate(spec.entries):
            choices[c] = np.array([row[i] for row in rows], dtype=np.int64).reshape(host.n, k)
        return cls(host, Mode.parse(data["mode"]), spec, choices)


def _draw_block(g: Graph, k: int, mode: Mode, rng: np.random.Generator) -> np.ndarray:
    n = g.n
    offsets, targets = g.csr
    deg = np.diff(offsets)
    need = k if mode is Mode.WITHOUT_REPLACEMENT else 1
    short = np.flatnonzero(deg < need)
    if k > 0 and len(short):
        v = int(short[0])
        raise DegreeTooSmall(v, int(deg[v]), need)
    if n == 0 or k == 0:
        return np.zeros((n, k), dtype=np.int64)
    idx = (rng.random((n, k)) * deg[:, None]).astype(np.int64)
    if mode is Mode.WITHOUT_REPLACEMENT and k > 1:
        # rows where k is a large fraction of the degree get a direct permutation draw
        dense = np.flatnonzero(2 * k > deg)
        for v in dense.tolist():
            idx[v] = rng.permutation(int(deg[v]))[:k]
        # remaining rows: redraw any row with a repeat; uniform over distinct ordered tuples
        while True:
            srt = np.sort(idx, axis=1)
            bad = np.flatnonzero((srt[:, 1:] == srt[:, :-1]).any(axis=1))
            if len(bad) == 0:
                break
            idx[bad] = (rng.random((len(bad), k)) * deg[bad, None]).astype(np.int64)
    return targets[offsets[:-1, None] + idx]


def sample_colored(
    g: Graph, spec: ColorSpec, mode: Mode | str, rng: np.random.Generator
) -> KOutSample:
    """Independent choices for each color class; distinctness is enforced only within a class."""
    mode = Mode.parse(mode)
    choices = {c: _draw_block(g, k, mode, rng) for c, k in spec.entries}
    return KOutSample(g, mode, spec, choices)


def sample(g: Graph, k: int, mode: Mode | str, rng: np.random.Generator) -> KOutSample:
    """Each vertex picks ``k`` random host neighbors."""
    return sample_colored(g, ColorSpec.single(k), mode, rng)


def split_green_blue(s: KOutSample, rng: np.random.Generator) -> KOutSample:
    """Recolor one uniformly chosen choice per vertex blue, the other ``k-1`` green."""
    if len(s.spec.entries) != 1:
        raise BadMultiplicity("split_green_blue needs a single-color sample")
    (c, k), = s.spec.entries
    if k < 2:
        raise BadMultiplicity(f"need multiplicity >= 2 to keep a green choice, got {k}")
    arr = s.choices[c]
    n = s.n
    pick = rng.integers(0, k, size=n)
    blue = arr[np.arange(n), pick][:, None]
    mask = np.ones((n, k), dtype=bool)
    mask[np.arange(n), pick] = False
    green = arr[mask].reshape(n, k - 1)
    return KOutSample(s.host, s.mode, ColorSpec(((GREEN, k - 1), (BLUE, 1))), {GREEN: green, BLUE: blue})


def underlying_graph(s: KOutSample, color_filter: Iterable[int] | None = None) -> Graph:
    """Forget orientation and merge parallel arcs."""
    n = s.n
    use = s._filter(color_filter)
    if not use or n == 0:
        return Graph(n, [()] * n)
    src = np.concatenate([np.repeat(np.arange(n), s.choices[c].shape[1]) for c in use])
    dst = np.concatenate([s.choices[c].reshape(-1) for c in use])
    lo = np.minimum(src, dst)
    hi = np.maximum(src, dst)
    codes = np.unique(lo.astype(np.int64) * n + hi)
    return Graph._from_pair_arrays(n, codes // n, codes % n)


def out_neighborhood(s: KOutSample, S: Iterable[int], color_filter: Iterable[int] | None = None) -> set[int]:
    """Union of the out-choices of ``S``, minus ``S`` itself."""
    members = set(S)
    out: set[int] = set()
    for v in members:
        out.update(s.out_choices(v, color_filter))
    return out - members


class ChoiceOracle:
    """Lazily revealed k-out choices with per-vertex, per-color budgets.

    Every draw is logged as ``(v, color, w)``; two oracles built with the same
    host, spec, mode and seed that receive the same sequence of calls produce
    identical logs.
    """

    _BUFFER = 2048

    def __init__(
        self,
        g: Graph,
        spec: ColorSpec,
        mode: Mode | str = Mode.WITH_REPLACEMENT,
        seed: int | np.random.SeedSequence | None = None,
        rng: np.random.Generator | None = None,
    ) -> None:
        self.host = g
        self.spec = spec
        self.mode = Mode.parse(mode)
        self._rng = rng if rng is not None else np.random.default_rng(seed)
        self._col = {c: i for i, c in enumerate(spec.ids)}
        self._mult = [k for _, k in spec.entries]
        self._used = [[0] * len(spec.entries) for _ in range(g.n)]
        self._drawn: dict[tuple[int, int], list[int]] = {}
        self.log: list[tuple[int, int, int]] = []
        self._buf = self._rng.random(self._BUFFER)
        self._pos = 0

    def _uniform(self) -> float:
        if self._pos == self._BUFFER:
            self._buf = self._rng.random(self._BUFFER)
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return float(u)

    def used(self, v: int, color: int) -> int:
        return self._used[v][self._col[color]]

    def remaining(self, v: int, color: int) -> int:
        i = self._col[color]
        return self._mult[i] - self._used[v][i]

    def draw(self, v: int, color: int) -> int:
        i = self._col[color]
        row = self._used[v]
        if row[i] >= self._mult[i]:
            raise BudgetExhausted(v, color)
        nbrs = self.host.adj[v]
        d = len(nbrs)
        if d == 0:
            raise DegreeTooSmall(v, 0, 1)
        if self.mode is Mode.WITH_REPLACEMENT:
            w = nbrs[int(self._uniform() * d)]
        else:
            prior = self._drawn.setdefault((v, color), [])
            if len(prior) >= d:
                raise DegreeTooSmall(v, d, len(prior) + 1)
            if 2 * len(prior) < d:
                w = nbrs[int(self._uniform() * d)]
                while w in prior:
                    w = nbrs[int(self._uniform() * d)]
            else:
                taken = set(prior)
                free = [x for x in nbrs if x not in taken]
                w = free[int(self._uniform() * len(free))]
            prior.append(w)
        row[i] += 1
        self.log.append((v, color, w))
        return w

    def draws_of(self, v: int, color: int) -> list[int]:
        return [w for (x, c, w) in self.log if x == v and c == color]

    def revealed_edges(self) -> set[tuple[int, int]]:
        return {(min(v, w), max(v, w)) for v, _, w in self.log}

    def freeze(self) -> KOutSample:
        """Spend every remaining budget, then package all draws as a :class:`KOutSample`."""
        n = self.host.n
        for v in range(n):
            for c in self.spec.ids:
                while self.remaining(v, c) > 0:
                    self.draw(v, c)
        per: dict[tuple[int, int], list[int]] = {}
        for v, c, w in self.log:
            per.setdefault((v, c), []).append(w)
        choices = {
            c: np.array([per.get((v, c), []) for v in range(n)], dtype=np.int64).reshape(n, k)
            for c, k in self.spec.entries
        }
        return KOutSample(self.host, self.mode, self.spec, choices)


def oracle(
    g: Graph, spec: ColorSpec, mode: Mode | str = Mode.WITH_REPLACEMENT, seed: int | None = None
) -> ChoiceOracle:
    return ChoiceOracle(g, spec, mode, seed=seed)


def draw(o: ChoiceOracle, v: int, color: int) -> int:
    return o.draw(v, color)
