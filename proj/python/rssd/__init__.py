"""Robust static output feedback design over a set of LTI plants."""

import json
from pathlib import Path

from ._rssd import (
    FrequencyGrid,
    Plant,
    RssdError,
    central_plant,
    closed_loop_matrix,
    disk_margin,
    gsm,
    is_internally_stable,
    linf_norm,
    nu_gap,
)
from . import _rssd

__all__ = [
    "FrequencyGrid",
    "Plant",
    "RssdError",
    "central_plant",
    "closed_loop_matrix",
    "disk_margin",
    "dump_plant_set",
    "gsm",
    "is_internally_stable",
    "linf_norm",
    "load_plant_set",
    "nu_gap",
    "simulate",
    "synthesize",
]


def load_plant_set(path):
    """Read a plant-set JSON file; returns (plants, trim dicts)."""
    plants, trim = _rssd._parse_plant_set(Path(path).read_text())
    return plants, [json.loads(t) for t in trim]


def dump_plant_set(plants, trim=None):
    """Canonical plant-set JSON text."""
    trim = [json.dumps(t) for t in (trim or [None] * len(plants))]
    return _rssd._dump_plant_set(plants, trim)


def synthesize(plants, config, seed=None):
    """Run the two-stage synthesis; config is a dict in the run-config format."""
    return json.loads(_rssd._synthesize(plants, json.dumps(config), seed))


def simulate(plant, K, scenario, controller=None):
    """Simulate one scenario dict around K (and optional w_in/w_out banks)."""
    return _rssd._simulate(plant, K, json.dumps(scenario),
                           json.dumps(controller) if controller else "")
