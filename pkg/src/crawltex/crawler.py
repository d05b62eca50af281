"""Artificial-crawler evolution on pixel grids.

Agents live on pixels, climb (``max``) or descend (``min``) intensity
gradients, pay an energy cost every iteration, absorb energy from the
pixel they occupy, and die below a survival threshold or when a stronger
agent lands on the same pixel. The per-iteration count of live agents is
the texture signature.

Each iteration applies, in this fixed order: synchronous movement of all
live agents (decisions read the previous iteration's positions), energy
consumption, the collision rule (highest energy survives, lowest internal
index on equal energy), energy absorption from the occupied pixel, the
energy cap, and the survival check. The live-agent count is recorded
after the survival check; index 0 of the curve counts agents right after
placement.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .imgio import GrayImage

KERNELS = ("max", "min", "both")
DIRECTIONS = ("max", "min")
PLACEMENTS = ("random_without_replacement", "deterministic_all_pixels")

# Agents die when energy <= e_min, compared with this absolute slack so
# that fractional absorption sums landing on the threshold are not kept
# alive by rounding.
DEATH_TOLERANCE = 1e-12

# 8-connected neighbor offsets (dy, dx) in row-major order; this order is
# the deterministic tie-break everywhere.
_OFFSETS = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))


@dataclass(frozen=True)
class CrawlerConfig:
    """All evolution parameters.

    ``e_unity`` is the energy consumed per iteration and ``absorption`` the
    fraction of the occupied pixel's intensity gained per iteration.
    Defaults follow the reference parameterization: initial energy 10,
    survival threshold 1, cap 12, unit consumption, absorption 0.01.
    """

    initial_energy: float = 10.0
    e_min: float = 1.0
    e_max: float = 12.0
    e_unity: float = 1.0
    absorption: float = 0.01
    n_agents: int = 1000
    t_max: int = 41
    kernel: str = "both"
    placement: str = "random_without_replacement"
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.e_min < self.initial_energy <= self.e_max:
            raise ParameterError(
                "energy bounds must satisfy 0 < e_min < initial_energy <= e_max, got "
                f"e_min={self.e_min}, initial_energy={self.initial_energy}, e_max={self.e_max}"
            )
        if self.e_unity <= 0:
            raise ParameterError(f"e_unity must be > 0, got {self.e_unity}")
        if self.absorption < 0:
            raise ParameterError(f"absorption must be >= 0, got {self.absorption}")
        if self.n_agents < 1:
            raise ParameterError(f"n_agents must be >= 1, got {self.n_agents}")
        if self.t_max < 1:
            raise ParameterError(f"t_max must be >= 1, got {self.t_max}")
        if self.kernel not in KERNELS:
            raise ParameterError(f"kernel must be one of {KERNELS}, got {self.kernel!r}")
        if self.placement not in PLACEMENTS:
            raise ParameterError(
                f"placement must be one of {PLACEMENTS}, got {self.placement!r}"
            )


@dataclass(frozen=True)
class AgentState:
    """One agent's position (x, y), energy, and liveness."""

    position: tuple
    energy: float
    alive: bool


@dataclass(frozen=True)
class LiveAgentCurve:
    """Live-agent counts indexed by iteration, 0..t_max, for one kernel."""

    counts: np.ndarray
    kernel: str


@dataclass(frozen=True)
class Signature:
    """Feature vector of concatenated live-agent curves.

    Layout is the max-kernel curve followed by the min-kernel curve when
    ``kernel`` is ``both``, a single curve otherwise. Normalized values
    are counts divided by the number of agents placed.
    """

    values: np.ndarray
    kernel: str
    normalized: bool


def neighbors(pos, bounds):
    """In-bounds 8-connected neighbors of ``pos`` = (x, y), row-major order."""
    x, y = pos
    width, height = bounds
    result = []
    for dy, dx in _OFFSETS:
        nx, ny = x + dx, y + dy
        if 0 <= nx < width and 0 <= ny < height:
            result.append((nx, ny))
    return result


def movement_kernel(pos, image: GrayImage, occupied, direction: str):
    """Destination of one movement step from ``pos``.

    With ``direction="max"`` the agent settles when no neighbor is strictly
    brighter; otherwise it targets the brightest strictly-brighter
    neighbor. When several neighbors tie for brightest, an occupied one is
    preferred; remaining ties fall to row-major neighbor order.
    ``direction="min"`` mirrors this toward darker pixels.
    """
    if direction not in DIRECTIONS:
        raise ParameterError(f"direction must be 'max' or 'min', got {direction!r}")
    pix = image.pixels
    x, y = pos
    here = int(pix[y, x])
    best_value = None
    tied = []
    for nx, ny in neighbors(pos, (image.width, image.height)):
        value = int(pix[ny, nx])
        if direction == "max":
            if value <= here:
                continue
            if best_value is None or value > best_value:
                best_value, tied = value, [(nx, ny)]
            elif value == best_value:
                tied.append((nx, ny))
        else:
            if value >= here:
                continue
            if best_value is None or value < best_value:
                best_value, tied = value, [(nx, ny)]
            elif value == best_value:
                tied.append((nx, ny))
    if not tied:
        return (x, y)
    if len(tied) == 1:
        return tied[0]
    occupied_tied = [p for p in tied if p in occupied]
    return occupied_tied[0] if occupied_tied else tied[0]


def initial_positions(image: GrayImage, config: CrawlerConfig) -> np.ndarray:
    """Flat pixel indices of the agents at birth, in agent-index order."""
    pixel_count = image.width * image.height
    if config.placement == "deterministic_all_pixels":
        return np.arange(pixel_count, dtype=np.int64)
    if config.n_agents > pixel_count:
        raise ParameterError(
            f"cannot place {config.n_agents} agents without replacement on "
            f"{pixel_count} pixels"
        )
    rng = np.random.default_rng(config.seed)
    return rng.permutation(pixel_count)[: config.n_agents].astype(np.int64)


def _movement_tables(pixels: np.ndarray, direction: str):
    """Precompute per-pixel movement data for one direction.

    Returns (settle, best_mask, nbr_index): settle[p] marks pixels whose
    occupant never moves; best_mask[p, k] marks neighbor slot k as tied
    for the strictly-better extreme; nbr_index[p, k] is that neighbor's
    flat index (-1 out of bounds). Slots follow row-major neighbor order.
    """
    height, width = pixels.shape
    img = pixels.astype(np.int16)
    sentinel = -1 if direction == "max" else 300
    padded = np.full((height + 2, width + 2), sentinel, np.int16)
    padded[1:-1, 1:-1] = img

    nbr_vals = np.stack(
        [padded[1 + dy : 1 + dy + height, 1 + dx : 1 + dx + width] for dy, dx in _OFFSETS]
    )
    if direction == "max":
        better = nbr_vals > img
        candidates = np.where(better, nbr_vals, np.int16(-1))
        best = candidates.max(axis=0)
        settle = best < 0
    else:
        better = nbr_vals < img
        candidates = np.where(better, nbr_vals, np.int16(300))
        best = candidates.min(axis=0)
        settle = best > 255
    best_mask = better & (nbr_vals == best)

    ys, xs = np.indices((height, width))
    columns = []
    for dy, dx in _OFFSETS:
        ny, nx = ys + dy, xs + dx
        inside = (0 <= ny) & (ny < height) & (0 <= nx) & (nx < width)
        columns.append(np.where(inside, ny * width + nx, -1))
    nbr_index = np.stack(columns)

    flat = lambda a: np.ascontiguousarray(a.reshape(8, -1).T)
    return settle.reshape(-1), flat(best_mask), flat(nbr_index.astype(np.int32))


class CrawlerEngine:
    """Stepwise evolution of one agent population on one image.

    State arrays are indexed by agent (birth order): flat positions,
    energies, and alive flags. ``step`` advances one iteration; ``run``
    drives the full evolution and returns the live-agent curve.
    """

    def __init__(self, image: GrayImage, config: CrawlerConfig, direction: str):
        if direction not in DIRECTIONS:
            raise ParameterError(f"direction must be 'max' or 'min', got {direction!r}")
        self.config = config
        self.direction = direction
        self._width = image.width
        self._intensities = image.pixels.reshape(-1).astype(np.int16)
        self._settle, self._best_mask, self._nbr_index = _movement_tables(
            image.pixels, direction
        )
        self._positions = initial_positions(image, config)
        n = self._positions.size
        self._energies = np.full(n, float(config.initial_energy))
        self._alive = np.ones(n, bool)
        self._occupancy = np.zeros(self._intensities.size, bool)
        self._counts = np.zeros(config.t_max + 1, np.int64)
        self._counts[0] = n
        self._t = 0

    @property
    def t(self) -> int:
        return self._t

    @property
    def n_agents(self) -> int:
        return self._positions.size

    @property
    def positions(self) -> np.ndarray:
        return self._positions.copy()

    @property
    def energies(self) -> np.ndarray:
        return self._energies.copy()

    @property
    def alive(self) -> np.ndarray:
        return self._alive.copy()

    def step(self) -> None:
        """Advance one iteration (movement through survival check)."""
        if self._t >= self.config.t_max:
            raise ParameterError(f"evolution already completed {self.config.t_max} iterations")
        cfg = self.config
        agent_idx = np.flatnonzero(self._alive)
        if agent_idx.size:
            pos = self._positions[agent_idx]

            occupancy = self._occupancy
            occupancy.fill(False)
            occupancy[pos] = True

            cand_index = self._nbr_index[pos]
            cand_best = self._best_mask[pos]
            # -1 padding indexes the last pixel, but its mask bit is False.
            cand_occupied = cand_best & occupancy[cand_index]
            has_occupied = cand_occupied.any(axis=1)
            pick = np.where(
                has_occupied, cand_occupied.argmax(axis=1), cand_best.argmax(axis=1)
            )
            moved = cand_index[np.arange(pos.size), pick]
            new_pos = np.where(self._settle[pos], pos, moved)
            self._positions[agent_idx] = new_pos

            energies = self._energies[agent_idx] - cfg.e_unity
            self._energies[agent_idx] = energies

            # Collision rule: sort by (pixel, energy desc, birth index) and
            # keep the first agent of every pixel group.
            order = np.lexsort((agent_idx, -energies, new_pos))
            ordered_pos = new_pos[order]
            first = np.ones(order.size, bool)
            first[1:] = ordered_pos[1:] != ordered_pos[:-1]
            self._alive[agent_idx[order[~first]]] = False

            winners = agent_idx[order[first]]
            gained = self._energies[winners] + cfg.absorption * self._intensities[
                self._positions[winners]
            ]
            np.minimum(gained, cfg.e_max, out=gained)
            self._energies[winners] = gained
            starved = winners[gained <= cfg.e_min + DEATH_TOLERANCE]
            self._alive[starved] = False

        self._t += 1
        self._counts[self._t] = int(self._alive.sum())

    def run(self) -> LiveAgentCurve:
        while self._t < self.config.t_max:
            self.step()
        return LiveAgentCurve(counts=self._counts.copy(), kernel=self.direction)

    def agent_states(self):
        """Final per-agent states in birth order; dead agents keep the
        position and energy they had when removed."""
        width = self._width
        return [
            AgentState(
                position=(int(p % width), int(p // width)),
                energy=float(e),
                alive=bool(a),
            )
            for p, e, a in zip(self._positions, self._energies, self._alive)
        ]


def evolve(image: GrayImage, config: CrawlerConfig, direction: str):
    """Run a full evolution; returns the live-agent curve and final states.

    Deterministic for fixed (image, config, direction): placement is
    drawn from ``config.seed`` and every rule is tie-broken
    deterministically. Each call builds its own state, so distinct
    evolutions may run concurrently on separate threads.
    """
    engine = CrawlerEngine(image, config, direction)
    curve = engine.run()
    return curve, engine.agent_states()


def signature(image: GrayImage, config: CrawlerConfig, normalize: bool = True) -> Signature:
    """Texture signature of ``image`` under ``config.kernel``.

    ``both`` concatenates the max-kernel and min-kernel curves computed
    from the same seed, so both runs start from identical placements.
    Normalization divides counts by the number of agents placed.
    """
    directions = DIRECTIONS if config.kernel == "both" else (config.kernel,)
    curves = [evolve(image, config, d)[0] for d in directions]
    values = np.concatenate([c.counts for c in curves]).astype(np.float64)
    if normalize:
        values /= float(curves[0].counts[0])
    return Signature(values=values, kernel=config.kernel, normalized=normalize)


def curves_to_csv(curves) -> str:
    """CSV text for one or two live-agent curves.

    ``curves`` maps direction ("max"/"min") to a counts array; columns are
    ``t`` plus ``psi_max`` and/or ``psi_min`` in that order.
    """
    present = [d for d in DIRECTIONS if d in curves]
    if not present:
        raise ParameterError("no curves to export")
    lengths = {len(curves[d]) for d in present}
    if len(lengths) != 1:
        raise ParameterError("curves must have equal length")
    lines = ["t," + ",".join(f"psi_{d}" for d in present)]
    for t in range(lengths.pop()):
        lines.append(f"{t}," + ",".join(str(int(curves[d][t])) for d in present))
    return "\n".join(lines) + "\n"
