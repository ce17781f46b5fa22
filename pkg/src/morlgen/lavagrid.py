"""A deterministic lava-and-goals gridworld with weight-conditioned rewards.

The agent steers a MiniGrid-style triangle (turn left/right, forward) over
an 11x11 wall-enclosed grid to collect three colored goals. Rewards are
3-vectors ordered (goal, lava, time): collecting an uncollected goal pays
its color's share of a fixed bonus, standing on lava costs -1 per
timestep, and every step costs -1. Lava is traversable and never ends the
episode; the episode terminates once every goal present in the layout has
been collected, and truncates at a step cap.

Smaller grids are supported for desk-scale exact-oracle experiments; the
standard domain is 11x11 with all three goals present.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .momdp import EnvironmentContract, EpisodeOverError, Transition
from .stats import _rng_of, sample_simplex

EMPTY, LAVA, GOAL_GREEN, GOAL_YELLOW, GOAL_BLUE = 0, 1, 2, 3, 4
TILE_CHARS = ".LGYB"
GOAL_CODES = (GOAL_GREEN, GOAL_YELLOW, GOAL_BLUE)

NORTH, EAST, SOUTH, WEST = 0, 1, 2, 3
DIR_CHARS = "NESW"
# (dx, dy) per direction; y grows downward.
DIR_DELTAS = ((0, -1), (1, 0), (0, 1), (-1, 0))
AGENT_CHARS = "^>v<"

TURN_LEFT, TURN_RIGHT, FORWARD = 0, 1, 2
NUM_ACTIONS = 3
ACTION_CHARS = "LRF"

NUM_OBJECTIVES = 3  # (goal, lava, time)
GOAL_REWARD = 100.0
DEFAULT_MAX_STEPS = 256
DEFAULT_GAMMA = 0.995
DEFAULT_SIZE = 11


@dataclass
class LavaGridLayout:
    """Static grid content plus the agent's start pose.

    `tiles[y, x]` holds a cell code; the outer boundary is an implicit
    wall (moving off-grid is blocked), so there are no wall tiles.
    """

    tiles: np.ndarray
    agent_start: tuple[int, int]
    agent_dir: int

    def __post_init__(self):
        self.tiles = np.asarray(self.tiles, dtype=np.int8)
        self.agent_start = (int(self.agent_start[0]), int(self.agent_start[1]))
        self.agent_dir = int(self.agent_dir)

    @property
    def width(self) -> int:
        return self.tiles.shape[1]

    @property
    def height(self) -> int:
        return self.tiles.shape[0]

    def goal_positions(self) -> dict[int, tuple[int, int]]:
        """Mapping goal code -> (x, y) for goals present in the layout."""
        out = {}
        for code in GOAL_CODES:
            ys, xs = np.where(self.tiles == code)
            if len(xs) == 1:
                out[code] = (int(xs[0]), int(ys[0]))
            elif len(xs) > 1:
                raise ValueError(f"goal {TILE_CHARS[code]} appears {len(xs)} times")
        return out

    def validate(self, require_all_goals: bool = True) -> None:
        """Check layout invariants; raises ValueError on violation."""
        if self.tiles.ndim != 2:
            raise ValueError("tiles must be a 2-D grid")
        h, w = self.tiles.shape
        if h < 1 or w < 1:
            raise ValueError("grid must be nonempty")
        if not np.isin(self.tiles, [EMPTY, LAVA, *GOAL_CODES]).all():
            raise ValueError("tiles contain unknown cell codes")
        goals = self.goal_positions()  # raises on duplicated colors
        if require_all_goals and len(goals) != len(GOAL_CODES):
            missing = [TILE_CHARS[c] for c in GOAL_CODES if c not in goals]
            raise ValueError(f"missing goal tile(s): {missing}")
        if not goals:
            raise ValueError("layout has no goal tiles")
        x, y = self.agent_start
        if not (0 <= x < w and 0 <= y < h):
            raise ValueError(f"agent start {self.agent_start} out of bounds")
        if self.tiles[y, x] != EMPTY:
            raise ValueError("agent start must be an empty tile")
        if not 0 <= self.agent_dir < 4:
            raise ValueError(f"invalid agent orientation {self.agent_dir}")

    @classmethod
    def from_strings(
        cls, rows: list[str], agent_start: tuple[int, int], agent_dir: int
    ) -> "LavaGridLayout":
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("rows must be nonempty and rectangular")
        try:
            tiles = np.array(
                [[TILE_CHARS.index(ch) for ch in row] for row in rows], dtype=np.int8
            )
        except ValueError as exc:
            raise ValueError(f"unknown tile character: {exc}") from None
        return cls(tiles, agent_start, agent_dir)

    def to_strings(self) -> list[str]:
        return ["".join(TILE_CHARS[c] for c in row) for row in self.tiles]


@dataclass
class LavaGridContext:
    """One complete environment configuration: layout plus goal weights."""

    layout: LavaGridLayout
    weights: np.ndarray  # (green, yellow, blue), summing to 1
    name: str | None = None

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)

    def validate(self, require_all_goals: bool = True) -> None:
        self.layout.validate(require_all_goals=require_all_goals)
        if self.weights.shape != (3,):
            raise ValueError("weights must have exactly 3 components")
        if (self.weights < 0).any():
            raise ValueError("goal weights must be nonnegative")
        if abs(float(self.weights.sum()) - 1.0) > 1e-9:
            raise ValueError(f"goal weights must sum to 1, got {self.weights.sum()!r}")

    def to_json_obj(self) -> dict:
        obj = {
            "tiles": self.layout.to_strings(),
            "agent": {
                "x": self.layout.agent_start[0],
                "y": self.layout.agent_start[1],
                "dir": DIR_CHARS[self.layout.agent_dir],
            },
            "weights": [float(w) for w in self.weights],
        }
        if self.name is not None:
            obj["name"] = self.name
        return obj

    @classmethod
    def from_json_obj(cls, obj: dict) -> "LavaGridContext":
        try:
            agent = obj["agent"]
            layout = LavaGridLayout.from_strings(
                list(obj["tiles"]),
                (int(agent["x"]), int(agent["y"])),
                DIR_CHARS.index(str(agent["dir"])),
            )
            weights = np.asarray(obj["weights"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed context object: {exc}") from None
        return cls(layout, weights, name=obj.get("name"))


@dataclass(frozen=True)
class LavaGridObs:
    """Full observation: static grid, agent pose, remaining goal weights."""

    tiles: np.ndarray
    x: int
    y: int
    direction: int
    remaining_weights: np.ndarray
    collected_mask: int

    def signature(self) -> tuple[int, int, int, int]:
        """The per-episode dynamic state (pose + collected goals)."""
        return (self.x, self.y, self.direction, self.collected_mask)


class LavaGridEnv(EnvironmentContract):
    """Deterministic gridworld environment implementing the MOMDP contract."""

    def __init__(self, max_steps: int = DEFAULT_MAX_STEPS):
        if max_steps < 1:
            raise ValueError("max_steps must be positive")
        self.max_steps = max_steps
        self._ctx: LavaGridContext | None = None

    def num_objectives(self) -> int:
        return NUM_OBJECTIVES

    def action_count(self) -> int:
        return NUM_ACTIONS

    def reset(self, context: LavaGridContext, stream=None) -> LavaGridObs:
        context.validate(require_all_goals=False)
        self._ctx = context
        self._goals = context.layout.goal_positions()
        # bit i of the mask corresponds to GOAL_CODES[i]
        self._full_mask = sum(
            1 << i for i, code in enumerate(GOAL_CODES) if code in self._goals
        )
        self._x, self._y = context.layout.agent_start
        self._dir = context.layout.agent_dir
        self._mask = 0
        self._steps = 0
        self._done = False
        return self._obs()

    def _obs(self) -> LavaGridObs:
        remaining = np.array(self._ctx.weights, dtype=float)
        for i in range(3):
            if self._mask & (1 << i):
                remaining[i] = 0.0
        return LavaGridObs(
            tiles=self._ctx.layout.tiles,
            x=self._x,
            y=self._y,
            direction=self._dir,
            remaining_weights=remaining,
            collected_mask=self._mask,
        )

    def step(self, action: int) -> Transition:
        if self._ctx is None:
            raise EpisodeOverError("reset() must be called before step()")
        if self._done:
            raise EpisodeOverError("episode is over; call reset()")
        if action == TURN_LEFT:
            self._dir = (self._dir - 1) % 4
        elif action == TURN_RIGHT:
            self._dir = (self._dir + 1) % 4
        elif action == FORWARD:
            dx, dy = DIR_DELTAS[self._dir]
            nx, ny = self._x + dx, self._y + dy
            layout = self._ctx.layout
            if 0 <= nx < layout.width and 0 <= ny < layout.height:
                self._x, self._y = nx, ny
        else:
            raise ValueError(f"invalid action {action!r}")

        reward = np.zeros(NUM_OBJECTIVES)
        cell = int(self._ctx.layout.tiles[self._y, self._x])
        if cell in GOAL_CODES:
            bit = 1 << GOAL_CODES.index(cell)
            if self._mask & bit == 0 and self._full_mask & bit:
                reward[0] += GOAL_REWARD * float(
                    self._ctx.weights[GOAL_CODES.index(cell)]
                )
                self._mask |= bit
        if cell == LAVA:
            reward[1] -= 1.0
        reward[2] -= 1.0

        self._steps += 1
        terminal = self._mask == self._full_mask
        truncated = not terminal and self._steps >= self.max_steps
        self._done = terminal or truncated
        return Transition(self._obs(), reward, terminal, truncated)

    # -- episode state save/restore (used by the exhaustive enumerator) ---

    def clone_state(self) -> tuple:
        return (self._x, self._y, self._dir, self._mask, self._steps, self._done)

    def restore_state(self, state: tuple) -> None:
        self._x, self._y, self._dir, self._mask, self._steps, self._done = state


def render_ascii(context: LavaGridContext, env: LavaGridEnv | None = None) -> str:
    """Debug rendering: tile characters with the agent drawn as an arrow."""
    rows = [list(r) for r in context.layout.to_strings()]
    if env is not None and env._ctx is context:
        rows[env._y][env._x] = AGENT_CHARS[env._dir]
    else:
        x, y = context.layout.agent_start
        rows[y][x] = AGENT_CHARS[context.layout.agent_dir]
    return "\n".join("".join(r) for r in rows)


def reachable_cells(layout: LavaGridLayout) -> set[tuple[int, int]]:
    """Cells reachable from the start via in-bounds moves (BFS).

    Lava is passable, so on a wall-enclosed grid this is every cell; kept
    as an explicit check so layout generation stays honest if blocking
    tiles are ever added.
    """
    start = layout.agent_start
    seen = {start}
    frontier = [start]
    while frontier:
        x, y = frontier.pop()
        for dx, dy in DIR_DELTAS:
            nx, ny = x + dx, y + dy
            if 0 <= nx < layout.width and 0 <= ny < layout.height:
                if (nx, ny) not in seen:
                    seen.add((nx, ny))
                    frontier.append((nx, ny))
    return seen


def all_goals_reachable(layout: LavaGridLayout) -> bool:
    reach = reachable_cells(layout)
    return all(pos in reach for pos in layout.goal_positions().values())


def random_layout(
    stream,
    lava_count_range: tuple[int, int] = (0, 30),
    width: int = DEFAULT_SIZE,
    height: int = DEFAULT_SIZE,
    max_attempts: int = 100,
) -> LavaGridLayout:
    """Uniformly place lava, the three goals, and the agent on distinct cells.

    Rejection-samples until every goal is reachable from the start (a
    bounded budget; unreachable layouts cannot occur on a plain grid but
    the check is kept as a guarantee of the contract).
    """
    rng = _rng_of(stream)
    lo, hi = int(lava_count_range[0]), int(lava_count_range[1])
    if lo < 0 or hi < lo:
        raise ValueError(f"invalid lava count range ({lo}, {hi})")
    n_cells = width * height
    if hi + 4 > n_cells:
        raise ValueError("lava count range leaves no room for goals and agent")
    for _ in range(max_attempts):
        lava_count = int(rng.integers(lo, hi + 1))
        chosen = rng.choice(n_cells, size=lava_count + 4, replace=False)
        tiles = np.zeros((height, width), dtype=np.int8)
        cells = [(int(c % width), int(c // width)) for c in chosen]
        agent = cells[0]
        for (x, y), code in zip(cells[1:4], GOAL_CODES):
            tiles[y, x] = code
        for x, y in cells[4:]:
            tiles[y, x] = LAVA
        layout = LavaGridLayout(tiles, agent, int(rng.integers(4)))
        if all_goals_reachable(layout):
            return layout
    raise RuntimeError("exceeded rejection budget while sampling a layout")


@dataclass(frozen=True)
class LavaGridSpace:
    """Context parameter space for domain randomization."""

    width: int = DEFAULT_SIZE
    height: int = DEFAULT_SIZE
    lava_count_range: tuple[int, int] = (0, 30)

    def sample(self, stream) -> LavaGridContext:
        rng = _rng_of(stream)
        layout = random_layout(rng, self.lava_count_range, self.width, self.height)
        weights = sample_simplex(rng, 3)
        return LavaGridContext(layout, weights)


# -- builtin evaluation contexts ------------------------------------------
#
# The tile patterns are hand-authored to evoke each environment's name;
# goal weights are (green, yellow, blue).

_BUILTIN_SPECS: list[tuple[str, tuple[float, float, float], list[str], tuple[int, int], int]] = [
    (
        "Snake",
        (0.20, 0.30, 0.50),
        [
            "...........",
            ".LLLLLLLLL.",
            ".........L.",
            ".LLLLLLLLL.",
            ".L.........",
            ".LLLLLLLLL.",
            ".........L.",
            ".LLLLLLLLL.",
            ".L.........",
            ".L.G..Y..B.",
            "...........",
        ],
        (0, 0),
        SOUTH,
    ),
    (
        "Room",
        (0.50, 0.30, 0.20),
        [
            "...........",
            ".LLLLLLLLL.",
            ".L.......L.",
            ".L.G...Y.L.",
            ".L.......L.",
            ".L...B...L.",
            ".L.......L.",
            ".L.......L.",
            ".LLLL.LLLL.",
            "...........",
            "...........",
        ],
        (5, 10),
        NORTH,
    ),
    (
        "Smiley",
        (0.40, 0.40, 0.20),
        [
            "...........",
            "...........",
            "..LL...LL..",
            "..LL...LL..",
            "...........",
            ".....G.....",
            ".L.......L.",
            "..L.....L..",
            "...LLLLL...",
            "....Y.B....",
            "...........",
        ],
        (5, 0),
        SOUTH,
    ),
    (
        "Maze",
        (0.05, 0.05, 0.90),
        [
            "...........",
            "LLLL.LLLLL.",
            "...L.L...L.",
            ".L.L.L.L.L.",
            ".L.L.L.LGL.",
            ".L.L.L.LLL.",
            ".L...L...L.",
            ".LLLLLLL.L.",
            ".L.....L.L.",
            ".L.Y.B.L...",
            "...........",
        ],
        (0, 0),
        EAST,
    ),
    (
        "CheckerBoard",
        (0.30, 0.10, 0.60),
        [
            "...........",
            ".L.L.L.L.L.",
            "...........",
            ".L.L.L.L.L.",
            "...........",
            ".L.L.L.L.L.",
            "...........",
            ".L.L.L.L.L.",
            "...........",
            ".L.L.L.L.L.",
            "G....Y....B",
        ],
        (0, 0),
        EAST,
    ),
    (
        "Corridor",
        (0.60, 0.10, 0.30),
        [
            "...........",
            "LLLLLLLLLL.",
            "...........",
            ".LLLLLLLLLL",
            "G..........",
            "LLLLLLLLLL.",
            "..........Y",
            ".LLLLLLLLLL",
            "...........",
            "LLLLLLLLLL.",
            "B..........",
        ],
        (1, 0),
        EAST,
    ),
    (
        "Islands",
        (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0),
        [
            "...........",
            ".LL....LL..",
            ".LL....LL..",
            "....G......",
            "......LL...",
            ".LL...LL...",
            ".LL........",
            "....Y...LL.",
            "........LL.",
            ".B.........",
            "...........",
        ],
        (5, 10),
        NORTH,
    ),
    (
        "Labyrinth",
        (0.50, 0.05, 0.45),
        [
            "...........",
            ".LLLLLLLLL.",
            ".L.......L.",
            ".L.LLLLL.L.",
            ".L.L...L.L.",
            ".L.L.G.L.L.",
            ".L.L...L.L.",
            ".L.LLL.L.L.",
            ".L.......L.",
            ".LLLLLLLL..",
            "Y.........B",
        ],
        (0, 0),
        SOUTH,
    ),
]


def builtin_eval_contexts() -> list[tuple[str, LavaGridContext]]:
    """The 8 named evaluation contexts with their fixed goal weights."""
    out = []
    for name, weights, rows, agent, direction in _BUILTIN_SPECS:
        layout = LavaGridLayout.from_strings(rows, agent, direction)
        ctx = LavaGridContext(layout, np.array(weights), name=name)
        ctx.validate()
        out.append((name, ctx))
    return out


def builtin_context(name: str) -> LavaGridContext:
    for n, ctx in builtin_eval_contexts():
        if n == name:
            return ctx
    raise KeyError(f"unknown builtin context {name!r}")
