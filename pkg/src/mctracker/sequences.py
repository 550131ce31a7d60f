"""Sequence and ground-truth file ingestion.

A sequence is a directory of image files (PNG/JPEG/PGM/BMP) taken in
lexicographic order; benchmark-style layouts keeping frames under an ``img``
subdirectory are recognized.  Ground truth is one ``x,y,w,h`` line per frame,
comma, tab or whitespace separated.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .appearance import to_gray
from .evaluation import GroundTruth

IMAGE_EXTENSIONS = {".png", ".jpg", ".jpeg", ".pgm", ".bmp"}


class IngestionError(RuntimeError):
    """A frame could not be read; the message names the offending file."""


class GroundTruthError(ValueError):
    """A ground-truth file is malformed; the message carries the line number."""


def _frame_files(path: Path) -> list[Path]:
    if (path / "img").is_dir():
        path = path / "img"
    files = sorted(p for p in path.iterdir()
                   if p.suffix.lower() in IMAGE_EXTENSIONS)
    if not files:
        raise IngestionError(f"no image files found under {path}")
    return files


def load_sequence(path: str | os.PathLike) -> list[np.ndarray]:
    """Decode every frame in the directory to float grayscale in [0, 1]."""
    root = Path(path)
    if not root.is_dir():
        raise IngestionError(f"sequence directory not found: {root}")
    frames = []
    shape = None
    for p in _frame_files(root):
        try:
            with Image.open(p) as im:
                arr = np.asarray(im)
        except (OSError, UnidentifiedImageError) as exc:
            raise IngestionError(f"cannot decode frame {p.name}: {exc}") from exc
        gray = to_gray(arr)
        if shape is None:
            shape = gray.shape
        elif gray.shape != shape:
            raise IngestionError(
                f"frame {p.name} has size {gray.shape}, expected {shape}")
        frames.append(gray)
    return frames


def load_groundtruth(path: str | os.PathLike,
                     expected_count: int | None = None) -> GroundTruth:
    """Parse per-frame boxes, optionally checking the count against frames."""
    boxes = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.replace(",", " ").replace("\t", " ").split()
            if len(parts) != 4:
                raise GroundTruthError(
                    f"line {lineno}: expected 4 values, got {len(parts)}")
            try:
                boxes.append([float(v) for v in parts])
            except ValueError as exc:
                raise GroundTruthError(f"line {lineno}: {exc}") from exc
    if not boxes:
        raise GroundTruthError("ground-truth file is empty")
    if expected_count is not None and len(boxes) != expected_count:
        raise GroundTruthError(
            f"{len(boxes)} boxes for {expected_count} frames")
    return GroundTruth(np.array(boxes))


def save_sequence(frames, out_dir: str | os.PathLike) -> list[Path]:
    """Write float [0, 1] frames as 8-bit PNG files frames/%06d.png."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for k, frame in enumerate(frames):
        img = Image.fromarray(
            np.clip(np.asarray(frame) * 255.0 + 0.5, 0, 255).astype(np.uint8))
        p = out / f"{k:06d}.png"
        img.save(p)
        paths.append(p)
    return paths


def save_groundtruth(gt: GroundTruth, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for box in gt.boxes:
            fh.write(",".join(repr(float(v)) for v in box) + "\n")
