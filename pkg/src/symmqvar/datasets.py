"""Deterministic generators for the two learning datasets.

Board vectors use the ring-plus-center qubit ordering (corners 0,2,4,6;
edge midpoints 1,3,5,7; center 8) so they feed the 9-qubit models directly.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

#: ring index -> row-major grid index
RING_TO_RC = (0, 1, 2, 5, 8, 7, 6, 3, 4)
#: row-major grid index -> ring index
RC_TO_RING = tuple(RING_TO_RC.index(i) for i in range(9))

#: the eight winning lines in ring indexing
LINES_RING = tuple(
    tuple(RC_TO_RING[i] for i in line)
    for line in (
        (0, 1, 2), (3, 4, 5), (6, 7, 8),  # rows
        (0, 3, 6), (1, 4, 7), (2, 5, 8),  # columns
        (0, 4, 8), (2, 4, 6),  # diagonals
    )
)

CLASS_NAMES = ("circle", "draw", "cross")
DIFFICULTIES = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)


# ---------------------------------------------------------------------------
# Tic-tac-toe
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TTTGame:
    """A board (+1 cross, -1 circle, 0 empty) with a one-hot label vector.

    The label orders classes (circle, draw, cross) and marks the true class
    +1, the remaining two -1.
    """

    board: tuple[int, ...]
    label: tuple[int, int, int]

    @property
    def class_index(self) -> int:
        return self.label.index(1)

    @property
    def class_name(self) -> str:
        return CLASS_NAMES[self.class_index]

    def features(self) -> np.ndarray:
        return np.asarray(self.board, dtype=float)


def _has_line(board: Sequence[int], player: int) -> bool:
    return any(all(board[i] == player for i in line) for line in LINES_RING)


def label_board(board: Sequence[int]) -> str:
    """cross/circle iff that player completed a line; draw otherwise."""
    board = tuple(board)
    x_line = _has_line(board, 1)
    o_line = _has_line(board, -1)
    if x_line and o_line:
        raise ValueError("invalid board: both players have completed lines")
    if x_line:
        return "cross"
    if o_line:
        return "circle"
    return "draw"


def _one_hot(name: str) -> tuple[int, int, int]:
    idx = CLASS_NAMES.index(name)
    return tuple(1 if i == idx else -1 for i in range(3))


def enumerate_ttt() -> list[TTTGame]:
    """All board states reachable under legal alternating play.

    Cross moves first and play halts at the first completed line; unfinished
    and drawn boards are labeled draw. The output is duplicate-free and
    sorted lexicographically on the board vector.
    """
    seen: set[tuple[int, ...]] = set()
    stack: list[tuple[int, ...]] = [(0,) * 9]
    while stack:
        board = stack.pop()
        if board in seen:
            continue
        seen.add(board)
        if _has_line(board, 1) or _has_line(board, -1):
            continue  # play halts at the first completed line
        n_x = sum(1 for v in board if v == 1)
        n_o = sum(1 for v in board if v == -1)
        player = 1 if n_x == n_o else -1
        for q in range(9):
            if board[q] == 0:
                nxt = list(board)
                nxt[q] = player
                stack.append(tuple(nxt))
    games = [TTTGame(b, _one_hot(label_board(b))) for b in sorted(seen)]
    return games


def apply_board_permutation(board: Sequence[float], perm: Sequence[int]) -> tuple:
    """out[perm[i]] = board[i]; the data-side action of a qubit permutation."""
    out = [0.0] * len(board)
    for i, v in enumerate(board):
        out[perm[i]] = v
    return tuple(out)


# ---------------------------------------------------------------------------
# Driving scenarios
# ---------------------------------------------------------------------------

_DIRS = {"N": (-1, 0), "E": (0, 1), "S": (1, 0), "W": (0, -1)}
_LEFT = {"N": "W", "W": "S", "S": "E", "E": "N"}
_RIGHT = {"N": "E", "E": "S", "S": "W", "W": "N"}

#: hand-seeded road layouts as row-major (row, col) tile sets; each family is
#: closed under the 8 square symmetries before use
_SEED_LAYOUTS = {
    "straight_center": {(0, 1), (1, 1), (2, 1)},
    "straight_border": {(0, 0), (0, 1), (0, 2)},
    "curve_center": {(2, 1), (1, 1), (1, 2)},
    "curve_edge": {(0, 0), (0, 1), (1, 1), (2, 1)},
    "curve_corner": {(2, 0), (1, 0), (0, 0), (0, 1), (0, 2)},
    "t_center": {(1, 0), (1, 1), (1, 2), (2, 1)},
    "t_edge": {(0, 0), (0, 1), (0, 2), (1, 1), (2, 1)},
    "ring": {(0, 0), (0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1), (2, 2)},
    "x_center": {(0, 1), (1, 0), (1, 1), (1, 2), (2, 1)},
}

ROAD, BLOCKED, CAR, FACING = 1.0, -1.0, -1 / 3, 1 / 3


def _rc_transforms() -> list[Callable[[tuple[int, int]], tuple[int, int]]]:
    """The 8 square symmetries on (row, col) coordinates of the 3x3 grid."""

    def rot(t):  # 90 degrees counter-clockwise
        r, c = t
        return (2 - c, r)

    def flip(t):  # about the vertical axis
        r, c = t
        return (r, 2 - c)

    out = []
    for k in range(4):
        def rk(t, k=k):
            for _ in range(k):
                t = rot(t)
            return t

        out.append(rk)
        out.append(lambda t, rk=rk: flip(rk(t)))
    return out


def _closed_layouts() -> list[tuple[str, frozenset]]:
    """All seed layouts closed under the square symmetries, deduplicated."""
    transforms = _rc_transforms()
    found: dict[frozenset, str] = {}
    for family in sorted(_SEED_LAYOUTS):
        tiles = _SEED_LAYOUTS[family]
        for tf in transforms:
            img = frozenset(tf(t) for t in tiles)
            found.setdefault(img, family)
    return sorted(found.items(), key=lambda kv: sorted(kv[0]))


def _maneuvers(layout: frozenset, car: tuple[int, int], heading: str) -> frozenset:
    """Which of forward/left/right are road at the tile the car faces."""
    dr, dc = _DIRS[heading]
    ahead = (car[0] + dr, car[1] + dc)
    options = set()
    for name, d in (("F", heading), ("L", _LEFT[heading]), ("R", _RIGHT[heading])):
        ddr, ddc = _DIRS[d]
        target = (ahead[0] + ddr, ahead[1] + ddc)
        if target in layout:
            options.add(name)
    return frozenset(options)


#: maneuver set -> criticality level; an empty set means the car is leaving
#: the scene, which is rated like driving forward
_DIFFICULTY = {
    frozenset(): 0.0,
    frozenset("F"): 0.0,
    frozenset("L"): 0.2,
    frozenset("R"): 0.2,
    frozenset("FR"): 0.4,
    frozenset("FL"): 0.6,
    frozenset("LR"): 0.8,
    frozenset("FLR"): 1.0,
}


@dataclass(frozen=True)
class DrivingScenario:
    """A 3x3 road scene with a posed car and its difficulty rating.

    The grid vector (ring ordering) encodes road 1, impassable -1, the car
    -1/3 and the tile the car faces 1/3; car and facing markers override the
    road values underneath, and the scene decodes uniquely back to
    (layout, car position, heading).
    """

    layout: frozenset
    car: tuple[int, int]
    heading: str
    difficulty: float
    family: str

    @property
    def grid(self) -> tuple[float, ...]:
        values = {}
        for r in range(3):
            for c in range(3):
                values[(r, c)] = ROAD if (r, c) in self.layout else BLOCKED
        dr, dc = _DIRS[self.heading]
        values[(self.car[0] + dr, self.car[1] + dc)] = FACING
        values[self.car] = CAR
        out = [0.0] * 9
        for rc, v in values.items():
            out[RC_TO_RING[rc[0] * 3 + rc[1]]] = v
        return tuple(out)

    def features(self) -> np.ndarray:
        return np.asarray(self.grid, dtype=float)


def enumerate_driving() -> list[DrivingScenario]:
    """Every (layout, car tile, heading) pose with a road tile ahead.

    Layout seeds are closed under all rotations and reflections; the car is
    placed on every road tile with every heading that faces an adjacent road
    tile. Sorted lexicographically on the grid vector.
    """
    scenarios = []
    for layout, family in _closed_layouts():
        for car in sorted(layout):
            for heading, (dr, dc) in _DIRS.items():
                ahead = (car[0] + dr, car[1] + dc)
                if not (0 <= ahead[0] < 3 and 0 <= ahead[1] < 3):
                    continue
                if ahead not in layout:
                    continue
                difficulty = _DIFFICULTY[_maneuvers(layout, car, heading)]
                scenarios.append(
                    DrivingScenario(layout, car, heading, difficulty, family)
                )
    scenarios.sort(key=lambda s: s.grid)
    return scenarios


def decode_driving_grid(grid: Sequence[float]) -> tuple[frozenset, tuple[int, int], str]:
    """Invert DrivingScenario.grid; raises if the grid is not a valid pose."""
    cells = {}
    for ring, v in enumerate(grid):
        rc = RING_TO_RC[ring]
        cells[(rc // 3, rc % 3)] = float(v)
    cars = [t for t, v in cells.items() if v == CAR]
    faced = [t for t, v in cells.items() if v == FACING]
    if len(cars) != 1 or len(faced) != 1:
        raise ValueError("grid must contain exactly one car and one faced tile")
    car, ahead = cars[0], faced[0]
    delta = (ahead[0] - car[0], ahead[1] - car[1])
    heading = next((h for h, d in _DIRS.items() if d == delta), None)
    if heading is None:
        raise ValueError("faced tile is not adjacent to the car")
    layout = frozenset(
        t for t, v in cells.items() if v == ROAD
    ) | {car, ahead}
    return layout, car, heading


# ---------------------------------------------------------------------------
# Class-balanced splits
# ---------------------------------------------------------------------------


@dataclass
class SplitSpec:
    """How to carve class-balanced train/test subsets out of a dataset."""

    train_size: int
    test_size: int
    seed: int
    balance_key: str = "label"  # "label" | "difficulty"
    allow_duplicates: bool = False


def _class_key(item) -> object:
    if isinstance(item, TTTGame):
        return item.class_name
    return item.difficulty


def _quotas(total: int, classes: Sequence[object]) -> dict[object, int]:
    base, extra = divmod(total, len(classes))
    return {c: base + (1 if i < extra else 0) for i, c in enumerate(classes)}


def balanced_split(data: Sequence, spec: SplitSpec) -> tuple[list, list]:
    """Seeded class-balanced train/test split.

    Train and test are disjoint in terms of unique items. When a class pool
    cannot fill its train quota and duplicates are allowed, random copies of
    the drawn items are added; without duplicates this raises. A class pool
    exhausted on the test side is backfilled from classes with leftovers so
    the requested test size is always met exactly.
    """
    rng = np.random.default_rng(spec.seed)
    classes = sorted({_class_key(item) for item in data}, key=str)
    pools: dict[object, list[int]] = {c: [] for c in classes}
    for idx, item in enumerate(data):
        pools[_class_key(item)].append(idx)
    for c in classes:
        pools[c] = list(rng.permutation(pools[c]))

    train_quota = _quotas(spec.train_size, classes)
    train_idx: list[int] = []
    for c in classes:
        want = train_quota[c]
        have = pools[c][:want]
        pools[c] = pools[c][want:]
        if len(have) < want:
            if not spec.allow_duplicates:
                raise ValueError(
                    f"class {c!r} exhausted ({len(have)} < {want}) and duplication disabled"
                )
            copies = rng.choice(have, size=want - len(have), replace=True)
            have = have + [int(i) for i in copies]
        train_idx.extend(have)

    test_quota = _quotas(spec.test_size, classes)
    test_idx: list[int] = []
    deficit = 0
    for c in classes:
        want = test_quota[c]
        have = pools[c][:want]
        pools[c] = pools[c][want:]
        deficit += want - len(have)
        test_idx.extend(have)
    while deficit > 0:
        # backfill one item per class round-robin so no class dominates
        progress = False
        for c in classes:
            if deficit == 0:
                break
            if pools[c]:
                test_idx.append(pools[c].pop(0))
                deficit -= 1
                progress = True
        if not progress:
            raise ValueError("not enough unique samples for the requested test size")

    train = [data[i] for i in train_idx]
    test = [data[i] for i in test_idx]
    return train, test


def split_manifest(data: Sequence, spec: SplitSpec) -> dict:
    """The split as reproducible index lists plus the spec that made it."""
    train, test = balanced_split(data, spec)
    index = {id(item): i for i, item in enumerate(data)}
    return {
        "spec": {
            "train_size": spec.train_size,
            "test_size": spec.test_size,
            "seed": spec.seed,
            "balance_key": spec.balance_key,
            "allow_duplicates": spec.allow_duplicates,
        },
        "train_indices": [index[id(item)] for item in train],
        "test_indices": [index[id(item)] for item in test],
    }


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------


def features_and_targets(items: Sequence) -> tuple[np.ndarray, np.ndarray]:
    """Stacked feature matrix and targets (one-hot rows or difficulties)."""
    feats = np.stack([item.features() for item in items])
    if isinstance(items[0], TTTGame):
        targets = np.array([item.label for item in items], dtype=float)
    else:
        targets = np.array([item.difficulty for item in items], dtype=float)
    return feats, targets


def write_dataset_csv(items: Sequence, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"x{i}" for i in range(9)] + ["label"])
        for item in items:
            if isinstance(item, TTTGame):
                row = [repr(float(v)) for v in item.board] + [item.class_name]
            else:
                row = [repr(float(v)) for v in item.grid] + [repr(item.difficulty)]
            writer.writerow(row)


def write_dataset_json(items: Sequence, path) -> None:
    records = []
    for item in items:
        if isinstance(item, TTTGame):
            records.append({"board": list(item.board), "label": item.class_name})
        else:
            records.append(
                {
                    "grid": list(item.grid),
                    "difficulty": item.difficulty,
                    "family": item.family,
                }
            )
    with open(path, "w") as fh:
        json.dump(records, fh, indent=1)
        fh.write("\n")
