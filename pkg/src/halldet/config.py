"""Tool-wide configuration: one JSON tree file mirrored by CLI flags.

Flags override file values; the effective configuration is echoed into a
sidecar metadata file next to command outputs so runs stay reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .augment import AugmentationConfig
from .errors import DataError
from .pipeline import PipelineConfig
from .templates import TemplateConfig


@dataclass(frozen=True)
class CliConfig:
    backend_url: str = "http://127.0.0.1:8008"
    template: TemplateConfig = field(default_factory=TemplateConfig)
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    augmentation: AugmentationConfig = field(default_factory=AugmentationConfig)
    concurrency_limit: int = 8

    def __post_init__(self) -> None:
        if self.concurrency_limit < 1:
            raise DataError("concurrency_limit must be >= 1")

    def to_dict(self) -> dict[str, Any]:
        return {
            "backend_url": self.backend_url,
            "template": self.template.to_dict(),
            "pipeline": self.pipeline.to_dict(),
            "augmentation": self.augmentation.to_dict(),
            "concurrency_limit": self.concurrency_limit,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "CliConfig":
        template = (
            TemplateConfig.from_dict(data["template"])
            if "template" in data
            else TemplateConfig()
        )
        pipeline_data = dict(data.get("pipeline", {}))
        pipeline_data.setdefault("template", template.to_dict())
        kwargs: dict[str, Any] = {
            "template": template,
            "pipeline": PipelineConfig.from_dict(pipeline_data),
        }
        if "backend_url" in data:
            kwargs["backend_url"] = str(data["backend_url"])
        if "augmentation" in data:
            kwargs["augmentation"] = AugmentationConfig.from_dict(data["augmentation"])
        if "concurrency_limit" in data:
            kwargs["concurrency_limit"] = int(data["concurrency_limit"])
        return cls(**kwargs)


def load_config(path: str | Path) -> CliConfig:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON config: {exc}") from exc
    if not isinstance(data, dict):
        raise DataError(f"{path}: config root must be a JSON object")
    return CliConfig.from_dict(data)


def write_run_metadata(output_path: str | Path, command: str, config: Mapping[str, Any]) -> None:
    """Sidecar ``<output>.meta.json`` with the effective configuration.

    Deliberately timestamp-free so repeated identical runs produce
    byte-identical artifacts.
    """
    meta = {"command": command, "config": dict(config)}
    meta_path = Path(str(output_path) + ".meta.json")
    meta_path.write_text(json.dumps(meta, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
