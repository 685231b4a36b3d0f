"""
proxies/io.py
Proxy-set JSON: ``{"header": {kind, d, seed}, "spheres": [{center, radius}, ...]}``.
"""

import json
import logging
from pathlib import Path
from typing import Union

import numpy as np

from proxies.spheres import ProxySet, Spheres

logger = logging.getLogger(__name__)


def proxy_to_dict(proxy: ProxySet, seed: int) -> dict:
    return {
        "header": {"kind": proxy.kind, "d": proxy.dim, "seed": int(seed)},
        "spheres": [{"center": s.center.tolist(), "radius": float(s.radius)} for s in proxy.spheres],
    }


def save_proxy(proxy: ProxySet, path: Union[str, Path], seed: int) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(proxy_to_dict(proxy, seed), indent=2) + "\n", encoding="utf-8")
    logger.info("Wrote %s proxy %s (%d spheres)", proxy.kind, path, len(proxy))
    return path


def load_proxy(path: Union[str, Path]) -> tuple[ProxySet, int]:
    """Returns the proxy and the seed recorded in its header."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        head = data["header"]
        d = int(head["d"])
        rows = data["spheres"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"{path}: not a proxy file ({exc})") from exc
    if rows:
        spheres = Spheres(np.array([r["center"] for r in rows], dtype=np.float64),
                          np.array([r["radius"] for r in rows], dtype=np.float64))
    else:
        spheres = Spheres.empty(d)
    if spheres.dim != d:
        raise ValueError(f"{path}: header says d={d}, spheres have d={spheres.dim}")
    return ProxySet(spheres, str(head["kind"])), int(head.get("seed", 0))
