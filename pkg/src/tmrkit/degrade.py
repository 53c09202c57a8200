"""Noised image generation: fuse tombstone photos with damage textures.

Blending works on RGB uint8 arrays; overlays are resampled to the photo's
size first. At alpha 0 the output file is a byte copy of the input, so
"no noise" runs stay bit-comparable with the originals.
"""

from __future__ import annotations

import random
import shutil
from dataclasses import replace
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np
from PIL import Image

from tmrkit.assets import data_path
from tmrkit.corpus import CorpusEntry

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")


class NoiseLevel(Enum):
    ZERO = 0.0
    LOW = 0.2
    MEDIUM = 0.4
    HIGH = 0.6

    @property
    def alpha(self) -> float:
        return self.value

    @classmethod
    def from_name(cls, name: str) -> "NoiseLevel":
        try:
            return cls[name.upper()]
        except KeyError:
            raise ValueError(
                f"unknown noise level {name!r};"
                f" expected one of {[level.name.lower() for level in cls]}"
            ) from None


def load_image(path: str | Path) -> np.ndarray:
    """Read any supported image as an RGB uint8 array (H, W, 3)."""
    with Image.open(path) as img:
        return np.asarray(img.convert("RGB"), dtype=np.uint8)


def save_image(array: np.ndarray, path: str | Path) -> None:
    """Write a PNG atomically (temp file, then rename)."""
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    Image.fromarray(array, "RGB").save(tmp, format="PNG")
    tmp.replace(path)


def resample_overlay(overlay: np.ndarray, width: int, height: int) -> np.ndarray:
    """Bilinear resize to the target photo's dimensions."""
    if overlay.shape[1] == width and overlay.shape[0] == height:
        return overlay
    img = Image.fromarray(overlay, "RGB").resize((width, height), Image.BILINEAR)
    return np.asarray(img, dtype=np.uint8)


def alpha_blend(original: np.ndarray, overlay: np.ndarray, alpha: float) -> np.ndarray:
    """Per channel: round((1 - alpha) * original + alpha * overlay).

    Halves round up; results clamp to [0, 255]. Inputs must already share
    dimensions; resample the overlay first.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    if original.shape != overlay.shape:
        raise ValueError(
            f"dimension mismatch: original {original.shape}, overlay {overlay.shape}"
        )
    if alpha == 0.0:
        return original.copy()
    if alpha == 1.0:
        return overlay.copy()
    mixed = (1.0 - alpha) * original.astype(np.float64) + alpha * overlay.astype(
        np.float64
    )
    return np.clip(np.floor(mixed + 0.5), 0, 255).astype(np.uint8)


def packaged_overlays() -> list[Path]:
    return list_overlays(data_path("overlays"))


def list_overlays(directory: str | Path) -> list[Path]:
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"overlay directory not found: {directory}")
    found = sorted(
        p for p in directory.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES
    )
    if not found:
        raise FileNotFoundError(f"no overlay images in {directory}")
    return found


def generate_noised_corpus(
    entries: Sequence[CorpusEntry],
    overlays: Sequence[str | Path],
    level: NoiseLevel,
    seed: int,
    output_dir: str | Path,
    alpha: float | None = None,
) -> list[CorpusEntry]:
    """Blend every image with a seeded-random overlay; return the new manifest.

    Gold paths, GPS, tags, and splits pass through untouched; only the image
    path changes. `alpha` overrides the level's default weight.
    """
    if not overlays:
        raise FileNotFoundError("no overlays supplied")
    overlay_paths = [Path(p) for p in overlays]
    for path in overlay_paths:
        if not path.is_file():
            raise FileNotFoundError(f"overlay not found: {path}")
    weight = level.alpha if alpha is None else alpha
    if not 0.0 <= weight <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {weight}")

    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    rng = random.Random(seed)
    assignments = [rng.choice(overlay_paths) for _ in entries]

    overlay_cache: dict[Path, np.ndarray] = {}
    noised: list[CorpusEntry] = []
    suffix = level.name.lower()
    for entry, overlay_path in zip(entries, assignments):
        out_path = output_dir / f"{entry.id}_{suffix}.png"
        if weight == 0.0:
            # Byte copy: re-encoding would perturb nothing but the bytes.
            tmp = out_path.with_suffix(out_path.suffix + ".tmp")
            shutil.copyfile(entry.image, tmp)
            tmp.replace(out_path)
        else:
            original = load_image(entry.image)
            if overlay_path not in overlay_cache:
                overlay_cache[overlay_path] = load_image(overlay_path)
            overlay = resample_overlay(
                overlay_cache[overlay_path],
                original.shape[1],
                original.shape[0],
            )
            save_image(alpha_blend(original, overlay, weight), out_path)
        noised.append(replace(entry, image=str(out_path)))
    return noised


__all__ = [
    "NoiseLevel",
    "alpha_blend",
    "generate_noised_corpus",
    "list_overlays",
    "load_image",
    "packaged_overlays",
    "resample_overlay",
    "save_image",
]
