# pipeline/demo_models.py
# Seeded block towers for `fack-run` when the input carries no explicit tower.

import logging
from typing import Any, Dict, Optional, Tuple

import numpy as np

from constants import FACK_RUN
from fack.tower import TowerModel, block_tower, random_block_tower, random_corner_element
from matcore.errors import InvalidInputError

logger = logging.getLogger("fack")

DEMO_KEYS = ("block_rank", "blocks", "epsilon", "L", "K", "M")


def demo_params(overrides: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    params = {k: FACK_RUN[k] for k in DEMO_KEYS}
    params["random"] = True

    for key, value in (overrides or {}).items():
        if key not in params:
            raise InvalidInputError(f"unknown demo parameter '{key}'", f"$.demo.{key}")
        params[key] = value

    if int(params["blocks"]) < 2:
        raise InvalidInputError("demo tower needs at least 2 blocks", "$.demo.blocks")
    if not 0 < float(params["epsilon"]) < 0.5:
        raise InvalidInputError("demo epsilon must lie in (0, 0.5)", "$.demo.epsilon")

    return params


def build_demo(rng: np.random.Generator,
               overrides: Optional[Dict[str, Any]] = None) -> Tuple[TowerModel, Dict[str, Any]]:
    params = demo_params(overrides)
    shape = dict(
        block_rank=int(params["block_rank"]),
        blocks=int(params["blocks"]),
        epsilon=float(params["epsilon"]),
        L=int(params["L"]),
        K=int(params["K"]),
        M=int(params["M"]),
    )

    tower = random_block_tower(rng, **shape) if params["random"] else block_tower(**shape)

    logger.info(
        f"[FACK] demo tower: {shape['blocks']} blocks of rank {shape['block_rank']}, "
        f"L={shape['L']} K={shape['K']} M={shape['M']}, random={params['random']}"
    )
    return tower, params


def demo_element(tower: TowerModel, rng: np.random.Generator) -> np.ndarray:
    return random_corner_element(tower, rng)
