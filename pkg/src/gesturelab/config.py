"""Application configuration: file schema, defaults, backend construction.

The config file is JSON; every key is optional and falls back to the built-in
default. Arm geometry and workspace bounds follow the dict shapes produced by
`BodyModel.to_dict()` / `WorkspaceBounds.to_dict()`:

    {
      "sessions_dir": "sessions",
      "model": "gpt-4o-2024-05-13",
      "temperature": 0.7,
      "base_url": "https://api.openai.com/v1",
      "api_key_env": "OPENAI_API_KEY",
      "t": 10,
      "keyframe_dt": 0.5,
      "rate": 50.0,
      "i_max": 5,
      "attempts": 3,
      "regenerations": 1,
      "collision_margin": 0.02,
      "prompt_dir": null,
      "bounds": {"x": [-0.1, 0.65], "y": [-0.75, 0.75], "z": [-0.7, 0.6]},
      "body": {
        "left":  {"side": "left", "shoulder_offset": [0.0, 0.2, 0.4],
                   "upper_arm_length": 0.3, "forearm_length": 0.25,
                   "hand_length": 0.08, "joint_limits": [[lo, hi] x 7],
                   "capsule_radii": [0.05, 0.045, 0.035],
                   "rest_config": [7 angles]},
        "right": { ... },
        "torso": {"a": [x,y,z], "b": [x,y,z], "radius": 0.1}
      }
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .agents import (
    ChatBackend,
    DEFAULT_MODEL,
    DEFAULT_TEMPERATURE,
    OpenAIBackend,
    load_script,
)
from .kinematics import BodyModel
from .motion import DEFAULT_BOUNDS, DEFAULT_KEYFRAME_DT, DEFAULT_T, WorkspaceBounds
from .session import DEFAULT_I_MAX, SessionConfig
from .trajectory import DEFAULT_RATE


@dataclass
class AppConfig:
    sessions_dir: Path = Path("sessions")
    model: str = DEFAULT_MODEL
    temperature: float = DEFAULT_TEMPERATURE
    base_url: str = "https://api.openai.com/v1"
    api_key_env: str = "OPENAI_API_KEY"
    t: int = DEFAULT_T
    keyframe_dt: float = DEFAULT_KEYFRAME_DT
    rate: float = DEFAULT_RATE
    i_max: int = DEFAULT_I_MAX
    attempts: int = 3
    regenerations: int = 1
    collision_margin: float = 0.02
    prompt_dir: str | None = None
    bounds: WorkspaceBounds = DEFAULT_BOUNDS
    body: BodyModel = field(default_factory=BodyModel.default)

    @classmethod
    def load(cls, path=None) -> "AppConfig":
        config = cls()
        if path is None:
            return config
        data = json.loads(Path(path).read_text())
        for key in (
            "model",
            "temperature",
            "base_url",
            "api_key_env",
            "t",
            "keyframe_dt",
            "rate",
            "i_max",
            "attempts",
            "regenerations",
            "collision_margin",
            "prompt_dir",
        ):
            if key in data:
                setattr(config, key, data[key])
        if "sessions_dir" in data:
            config.sessions_dir = Path(data["sessions_dir"])
        if "bounds" in data:
            config.bounds = WorkspaceBounds.from_dict(data["bounds"])
        if "body" in data:
            config.body = BodyModel.from_dict(data["body"])
        return config

    def session_config(self) -> SessionConfig:
        return SessionConfig(
            t=self.t,
            keyframe_dt=self.keyframe_dt,
            rate=self.rate,
            i_max=self.i_max,
            attempts=self.attempts,
            regenerations=self.regenerations,
            collision_margin=self.collision_margin,
            bounds=self.bounds,
            body=self.body,
            prompt_dir=self.prompt_dir,
        )

    def make_backend(self, selector: str) -> ChatBackend:
        """Build a backend from a selector: 'openai' or 'scripted:<path>'."""
        if selector == "openai":
            return OpenAIBackend(
                model=self.model,
                base_url=self.base_url,
                api_key_env=self.api_key_env,
                temperature=self.temperature,
            )
        if selector.startswith("scripted:"):
            return load_script(selector.split(":", 1)[1])
        raise ValueError(
            f"unknown backend selector {selector!r}; use 'openai' or 'scripted:<file>'"
        )
