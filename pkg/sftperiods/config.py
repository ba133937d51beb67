import os
from pathlib import Path

import yaml

_ENV_OVERRIDES = {
    "SFT_MAX_NODES": ("solver.max_nodes", int),
    "SFT_MAX_SECONDS": ("solver.max_seconds", float),
    "SFT_MAX_VERTICAL": ("solver.max_vertical", int),
    "SFT_THREADS": ("solver.threads", int),
}


class Config:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
            cls._instance.load_config()
        return cls._instance

    def load_config(self):
        base_dir = Path(__file__).resolve().parent.parent
        config_path = Path(os.environ.get("SFT_CONFIG", base_dir / "config.yml"))

        self.app_config = {}
        if config_path.exists():
            with open(config_path) as f:
                loaded = yaml.safe_load(f)
            if loaded is None:
                loaded = {}
            if not isinstance(loaded, dict):
                raise ValueError(
                    f"{config_path} must contain a mapping at top level, got {type(loaded).__name__}"
                )
            self.app_config = loaded

        for env_name, (key_path, cast) in _ENV_OVERRIDES.items():
            raw = os.environ.get(env_name)
            if raw is None or raw == "":
                continue
            try:
                value = cast(raw)
            except ValueError as e:
                raise ValueError(f"{env_name}={raw!r} is not a valid {cast.__name__}") from e
            self.set(key_path, value)

    def get(self, key_path, default=None):
        """
        Get a value from the application config using dot notation.
        e.g., 'solver.max_nodes'
        """
        keys = key_path.split(".")
        value = self.app_config
        for key in keys:
            if isinstance(value, dict) and key in value:
                value = value[key]
            else:
                return default
        return value

    def set(self, key_path, value):
        keys = key_path.split(".")
        node = self.app_config
        for key in keys[:-1]:
            node = node.setdefault(key, {})
        node[keys[-1]] = value


# Global config instance
config = Config()
