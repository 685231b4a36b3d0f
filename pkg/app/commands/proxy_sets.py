"""
app/commands/proxy_sets.py
`proxies`: medial, tangent, uniform and SDF-grid collision proxies at
matched float budgets, plus the error-vs-memory report.
"""

import argparse
import logging
from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, Field, field_validator

from app.commands.common import add_mf_arguments, add_scene_argument, oracle_config
from app.services.loaders import build_medial_field, merged_config
from app.services.manifest import RunManifest
from fields.grid import GridField
from fields.scene import load_scene
from proxies.candidates import FssConfig
from proxies.evaluation import pareto_report
from proxies.io import save_proxy

logger = logging.getLogger(__name__)


def parse_budgets(text: str) -> List[int]:
    try:
        return [int(b) for b in text.split(",") if b.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"budgets must be comma-separated integers, got {text!r}") from exc


class ProxiesRequest(BaseModel):
    scene: str
    out: Path
    proxy_dir: Optional[Path] = None
    budgets: List[int] = Field(default_factory=lambda: [64, 128, 256, 512])
    n_candidates: Optional[int] = Field(default=None, ge=1)
    epsilon: Optional[float] = Field(default=None, ge=0.0)
    samples: int = Field(default=4096, ge=1)
    mf: Literal["oracle", "grid", "neural"] = "oracle"
    checkpoint: Optional[Path] = None
    grid_res: Optional[int] = Field(default=None, ge=2)
    r_max: Optional[float] = Field(default=None, gt=0.0)
    seed: int = 0

    @field_validator("budgets")
    @classmethod
    def positive_budgets(cls, v: List[int]) -> List[int]:
        if not v or any(b < 1 for b in v):
            raise ValueError(f"budgets must be positive float counts, got {v}")
        return v


def register(subparsers) -> None:
    p = subparsers.add_parser("proxies", help="build sphere proxies and the error-vs-memory report")
    add_scene_argument(p)
    add_mf_arguments(p)
    p.add_argument("--budgets", type=parse_budgets, default=[64, 128, 256, 512],
                   help="comma-separated float budgets")
    p.add_argument("--n-candidates", type=int, default=None)
    p.add_argument("--epsilon", type=float, default=None, help="separation bias (default 0.05*diag)")
    p.add_argument("--samples", type=int, default=4096, help="surface samples for the error")
    p.add_argument("--out", type=Path, required=True, help="report CSV")
    p.add_argument("--proxy-dir", type=Path, default=None, help="where proxy files go (default: next to --out)")
    p.set_defaults(handler=run)


def run(args: argparse.Namespace) -> RunManifest:
    req = ProxiesRequest.model_validate(vars(args))
    scene = load_scene(req.scene)
    fss_cfg = merged_config(FssConfig, scene.defaults.fss, {
        "n_candidates": req.n_candidates, "epsilon": req.epsilon, "seed": req.seed,
    }).resolve(scene.diag)
    mf = build_medial_field(scene, req.mf, oracle_config(scene, req.r_max), req.checkpoint, req.grid_res)

    table, built = pareto_report(scene.field, mf, req.budgets, fss_cfg, seed=req.seed, n_surface=req.samples)
    req.out.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(req.out, index=False)
    outputs = [str(req.out)]

    proxy_dir = req.proxy_dir or req.out.parent / f"{req.out.stem}_proxies"
    for (budget, kind), proxy in built.items():
        if isinstance(proxy, GridField):
            path = proxy.save(proxy_dir / f"{kind}_{budget}.grid")
        else:
            path = save_proxy(proxy, proxy_dir / f"{kind}_{budget}.json", req.seed)
        outputs.append(str(path))

    return RunManifest(command="proxies", scene=str(scene.path), seed=req.seed, outputs=outputs, config={
        "request": req.model_dump(mode="json", exclude={"out", "proxy_dir"}),
        "fss": fss_cfg.model_dump(mode="json"),
    })
