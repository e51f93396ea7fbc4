"""On-disk JSON cache of master ladders, keyed by (p, j, format version)."""
from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Optional

from .field import make_field_ctx
from .funcrep import TowerFunction
from .ladder import MasterLadder, master_ladder

FORMAT_VERSION = 1
ENV_VAR = "RRTOWER_CACHE"


def cache_dir(explicit: Optional[str] = None) -> Optional[Path]:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path(explicit) if explicit else None


def ladder_to_json(ladder: MasterLadder) -> dict:
    rows = []
    for m, (c, w) in enumerate(zip(ladder.c, ladder.w)):
        rows.append({"m": m, "c": c, "w": None if w is None else w.to_json()})
    return {"format": FORMAT_VERSION, "p": ladder.p, "j": ladder.j, "rows": rows}


def ladder_from_json(obj: dict) -> MasterLadder:
    if obj.get("format") != FORMAT_VERSION:
        raise ValueError("stale ladder cache format")
    ctx = make_field_ctx(int(obj["p"]))
    j = int(obj["j"])
    rows = sorted(obj["rows"], key=lambda r: r["m"])
    c = tuple(int(r["c"]) for r in rows)
    w = tuple(None if r["w"] is None else TowerFunction.from_json(ctx, j, r["w"]) for r in rows)
    return MasterLadder(ctx.p, j, c, w)


def dumps(ladder: MasterLadder) -> str:
    return json.dumps(ladder_to_json(ladder), sort_keys=True, separators=(",", ":"))


def _path(root: Path, p: int, j: int) -> Path:
    return root / f"ladder-p{p}-j{j}-v{FORMAT_VERSION}.json"


def load_or_build(p: int, j: int, root: Optional[Path] = None, symbolic: bool = True) -> MasterLadder:
    """Read a cached ladder if present and valid, otherwise compute (and store)."""
    if root is not None:
        path = _path(root, p, j)
        if path.exists():
            try:
                ladder = ladder_from_json(json.loads(path.read_text()))
                if ladder.p == p and ladder.j == j and (ladder.symbolic or not symbolic):
                    return ladder
            except (ValueError, KeyError, TypeError):
                pass
    ladder = master_ladder(p, j, symbolic=symbolic)
    if root is not None:
        root.mkdir(parents=True, exist_ok=True)
        tmp = _path(root, p, j).with_suffix(".tmp")
        tmp.write_text(dumps(ladder))
        tmp.replace(_path(root, p, j))
    return ladder
