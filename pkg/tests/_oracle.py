"""Literal rule-by-rule reference simulator used only as a test oracle.

Simulates the evolution one agent at a time on plain Python data
structures: synchronous movement toward the strictly-better extreme
neighbor (occupied preferred among ties, then first in row-major order),
unit energy consumption, highest-energy-wins collisions (earliest agent
on equal energy), intensity absorption, energy cap, and the survival
threshold. Shares no code with the production engine except the initial
placement passed in by the caller.
"""

# (dy, dx) in row-major order.
OFFSETS = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))

DEATH_TOLERANCE = 1e-12


def reference_evolve(
    pixels,
    flat_positions,
    *,
    initial_energy=10.0,
    e_min=1.0,
    e_max=12.0,
    e_unity=1.0,
    absorption=0.01,
    t_max=41,
    direction="max",
):
    """Simulate and return (counts list, final (x, y, energy, alive) list).

    ``pixels`` is any 2-D indexable of intensities; ``flat_positions`` the
    agents' initial flat pixel indices in birth order.
    """
    height = len(pixels)
    width = len(pixels[0])
    agents = [
        {
            "x": int(p) % width,
            "y": int(p) // width,
            "energy": float(initial_energy),
            "alive": True,
        }
        for p in flat_positions
    ]
    counts = [sum(1 for a in agents if a["alive"])]

    for _ in range(t_max):
        occupied = {(a["x"], a["y"]) for a in agents if a["alive"]}

        # Movement: all decisions read the pre-step positions.
        targets = {}
        for i, agent in enumerate(agents):
            if not agent["alive"]:
                continue
            x, y = agent["x"], agent["y"]
            here = int(pixels[y][x])
            best = None
            tied = []
            for dy, dx in OFFSETS:
                nx, ny = x + dx, y + dy
                if not (0 <= nx < width and 0 <= ny < height):
                    continue
                value = int(pixels[ny][nx])
                if direction == "max" and value <= here:
                    continue
                if direction == "min" and value >= here:
                    continue
                strictly_better = (
                    best is None
                    or (direction == "max" and value > best)
                    or (direction == "min" and value < best)
                )
                if strictly_better:
                    best = value
                    tied = [(nx, ny)]
                elif value == best:
                    tied.append((nx, ny))
            if not tied:
                targets[i] = (x, y)
            else:
                occupied_tied = [p for p in tied if p in occupied]
                targets[i] = occupied_tied[0] if occupied_tied else tied[0]
        for i, (x, y) in targets.items():
            agents[i]["x"], agents[i]["y"] = x, y

        # Energy consumption.
        for agent in agents:
            if agent["alive"]:
                agent["energy"] -= e_unity

        # Law of the jungle: strongest agent per pixel survives, earliest
        # agent wins energy ties.
        by_pixel = {}
        for i, agent in enumerate(agents):
            if agent["alive"]:
                by_pixel.setdefault((agent["x"], agent["y"]), []).append(i)
        for members in by_pixel.values():
            if len(members) > 1:
                members.sort(key=lambda i: (-agents[i]["energy"], i))
                for loser in members[1:]:
                    agents[loser]["alive"] = False

        # Gain of energy, cap, then the survival threshold.
        for agent in agents:
            if not agent["alive"]:
                continue
            agent["energy"] += absorption * int(pixels[agent["y"]][agent["x"]])
            if agent["energy"] > e_max:
                agent["energy"] = e_max
            if agent["energy"] <= e_min + DEATH_TOLERANCE:
                agent["alive"] = False

        counts.append(sum(1 for a in agents if a["alive"]))

    return counts, [(a["x"], a["y"], a["energy"], a["alive"]) for a in agents]
