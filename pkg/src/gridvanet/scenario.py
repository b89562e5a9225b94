"""Scenario documents: JSON schema, validation, and synthetic generators."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from .errors import BadDimensionsError, DuplicateIdError, ScenarioError
from .params import SimParams
from .roadgraph import RoadGraph, load_graph

SCHEMA_VERSION = 1

GRID_VMAX = 15.0          # m/s
GRID_LANES = 1
GRID_JAM_DENSITY = 0.15   # veh/m/lane
DEPART_WINDOW_S = 60


@dataclass(frozen=True)
class VehicleSpec:
    id: int
    origin_edge: int
    offset: float
    dest: int
    depart_time: float


@dataclass
class Scenario:
    graph: RoadGraph
    vehicles: list[VehicleSpec]
    params: SimParams


def parse_scenario(doc: dict) -> Scenario:
    """Validate a scenario document and resolve all cross-references."""
    if not isinstance(doc, dict):
        raise ScenarioError("scenario document must be a JSON object")
    unknown = set(doc) - {"schema_version", "graph", "vehicles", "params"}
    if unknown:
        raise ScenarioError(f"unknown scenario keys: {sorted(unknown)}")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ScenarioError(f"unsupported schema_version {version!r}, expected {SCHEMA_VERSION}")
    graph = load_graph(doc.get("graph", {}))
    params = SimParams.from_dict(doc.get("params", {}))
    vehicles = []
    seen_ids: set[int] = set()
    for raw in doc.get("vehicles", []):
        spec = VehicleSpec(id=int(raw["id"]), origin_edge=int(raw["origin_edge"]),
                           offset=float(raw.get("offset", 0.0)), dest=int(raw["dest"]),
                           depart_time=float(raw["depart_time"]))
        if spec.id in seen_ids:
            raise DuplicateIdError(f"duplicate vehicle id {spec.id}")
        seen_ids.add(spec.id)
        if spec.origin_edge not in graph.edges:
            raise ScenarioError(f"vehicle {spec.id}: unknown origin_edge {spec.origin_edge}")
        if spec.dest not in graph.vertices:
            raise ScenarioError(f"vehicle {spec.id}: unknown dest vertex {spec.dest}")
        length = graph.edges[spec.origin_edge].length
        if not 0.0 <= spec.offset <= length:
            raise ScenarioError(f"vehicle {spec.id}: offset {spec.offset} outside [0, {length}]")
        if spec.depart_time < 0:
            raise ScenarioError(f"vehicle {spec.id}: negative depart_time")
        vehicles.append(spec)
    return Scenario(graph=graph, vehicles=vehicles, params=params)


def load_scenario(path: str | Path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(json.load(fh))


def save_scenario(doc: dict, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def gen_grid(rows: int, cols: int, spacing: float, n_vehicles: int,
             seed: int) -> dict:
    """Manhattan-grid scenario: rows x cols intersections, every street
    bidirectional (two directed edges), uniform edge properties, and
    rng-drawn vehicles departing within the first minute."""
    if rows < 1 or cols < 1 or rows * cols < 2:
        raise BadDimensionsError(f"grid {rows}x{cols} is too small")
    vertices = [{"id": r * cols + c, "x": c * spacing, "y": r * spacing}
                for r in range(rows) for c in range(cols)]
    edges = []

    def add_two_way(a: int, b: int) -> None:
        edges.append({"id": len(edges), "from": a, "to": b, "length": spacing,
                      "lanes": GRID_LANES, "vmax": GRID_VMAX,
                      "jam_density": GRID_JAM_DENSITY})
        edges.append({"id": len(edges), "from": b, "to": a, "length": spacing,
                      "lanes": GRID_LANES, "vmax": GRID_VMAX,
                      "jam_density": GRID_JAM_DENSITY})

    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                add_two_way(v, v + 1)
            if r + 1 < rows:
                add_two_way(v, v + cols)

    rng = random.Random(seed)
    vehicles = [{"id": i,
                 "origin_edge": rng.randrange(len(edges)),
                 "offset": 0.0,
                 "dest": rng.randrange(rows * cols),
                 "depart_time": float(rng.randint(0, DEPART_WINDOW_S))}
                for i in range(n_vehicles)]
    return {"schema_version": SCHEMA_VERSION,
            "graph": {"vertices": vertices, "edges": edges},
            "vehicles": vehicles,
            "params": SimParams().to_dict()}


def gen_bottleneck(rows: int = 5, cols: int = 5, spacing: float = 300.0,
                   n_vehicles: int = 100, seed: int = 0,
                   corridor_factor: float = 0.5,
                   crossing_fraction: float = 0.6) -> dict:
    """Grid scenario with a slowed central east-west corridor and a demand
    pattern that pushes most vehicles across it from west to east."""
    doc = gen_grid(rows, cols, spacing, n_vehicles, seed)
    mid = rows // 2
    mid_row_ids = {mid * cols + c for c in range(cols)}
    for e in doc["graph"]["edges"]:
        horizontal = abs(e["from"] - e["to"]) == 1
        if horizontal and e["from"] in mid_row_ids and e["to"] in mid_row_ids:
            e["vmax"] = GRID_VMAX * corridor_factor

    west_edges = [e["id"] for e in doc["graph"]["edges"]
                  if e["from"] % cols == 0 and e["to"] % cols == 0]
    east_vertices = [r * cols + (cols - 1) for r in range(rows)]
    rng = random.Random(seed + 1)
    n_cross = round(n_vehicles * crossing_fraction)
    for veh in doc["vehicles"][:n_cross]:
        veh["origin_edge"] = rng.choice(west_edges)
        veh["dest"] = rng.choice(east_vertices)
    return doc
