"""
Configuration management for the shrinkage path engine.
"""
import json
from pathlib import Path
from typing import Any, Dict, List, Literal

import numpy as np
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    # Path construction
    steps: int = 8
    mode: Literal["ml", "unbiased"] = "ml"

    # Data and output
    default_dataset: str = "portland"
    output_dir: Path = Path("traces")
    export_format: Literal["csv", "json"] = "csv"

    # Inference
    boundary_points: int = 128

    # Application Settings
    log_level: str = "INFO"
    tracing_enabled: bool = False

    model_config = SettingsConfigDict(
        env_prefix="SHRINK_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )


class AppConfig:
    """Global application configuration manager."""

    def __init__(self, defaults_path: Path | None = None):
        self.settings = Settings()
        self._defaults: Dict[str, Any] = {}
        self._defaults_path = defaults_path or Path(__file__).parent.parent / "config" / "defaults.json"

        self._load_defaults()

    def _load_defaults(self):
        """Load analysis and plotting defaults from the JSON configuration file."""
        if not self._defaults_path.exists():
            raise FileNotFoundError(f"Defaults configuration not found at {self._defaults_path}")

        with open(self._defaults_path, "r", encoding="utf-8") as f:
            self._defaults = json.load(f)

    @property
    def defaults(self) -> Dict[str, Any]:
        """Get the raw defaults document."""
        return self._defaults

    @property
    def plot_style(self) -> Dict[str, Any]:
        """Get SVG canvas, palette and dash-pattern settings."""
        return self._defaults.get("plot", {})

    @property
    def q_mesh(self) -> List[float]:
        """Get the default q-shape search mesh."""
        mesh = self._defaults.get("analysis", {}).get("q_mesh", {})
        values = np.linspace(mesh.get("min", -5.0), mesh.get("max", 5.0), int(mesh.get("count", 21)))
        # linspace drifts by an ulp; the mesh is meant to hold exact decimals
        return [round(float(q), 10) for q in values]

    @property
    def ellipse_levels(self) -> List[float]:
        """Get the default confidence levels for coefficient-pair ellipses."""
        return list(self._defaults.get("analysis", {}).get("ellipse_levels", [0.10, 0.90]))

    @property
    def lr_significance(self) -> tuple[int, float]:
        """Get (degrees of freedom, level) used to judge -2 log(LR) minima."""
        analysis = self._defaults.get("analysis", {})
        return int(analysis.get("lr_degrees_of_freedom", 2)), float(analysis.get("lr_significance_level", 0.99))


# Global configuration instance
config = AppConfig()
