"""Command line shell: track, eval, synth and sweep verbs.

Artifacts are plain files under the output directory: ``boxes.csv`` with one
row per frame, ``metrics.json`` with the headline numbers and curves,
``sweep.csv`` for observation-rate sweeps, and optional ``overlay``/``mask``
image dumps.  Every file is byte-identical across reruns with the same seed
and config.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw

from .appearance import vector_to_patch
from .completion import SolverParams
from .evaluation import GroundTruth, build_report
from .sequences import load_groundtruth, load_sequence, save_groundtruth, \
    save_sequence
from .synthetic import SyntheticSpec, generate_synthetic
from .tracker import FrameResult, TrackerConfig, run_tracker

BOXES_HEADER = "frame,x,y,w,h,score,err,iterations"

_TRACKER_KEYS = {
    "num_candidates": int,
    "sigma_x": float,
    "sigma_y": float,
    "sigma_s": float,
    "patch_w": int,
    "patch_h": int,
    "obs_rate": float,
    "n_templates": int,
    "seed": int,
    "workers": int,
    "solver_mu0": lambda v: None if v is None else float(v),
    "solver_rho": float,
    "solver_tol": float,
    "solver_max_iter": int,
}


def load_tracker_config(path: str | None) -> TrackerConfig:
    """Build a TrackerConfig from a flat JSON key-value file."""
    if path is None:
        return TrackerConfig()
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    unknown = set(raw) - set(_TRACKER_KEYS)
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    vals = {k: _TRACKER_KEYS[k](v) for k, v in raw.items()}
    solver = SolverParams(
        mu0=vals.pop("solver_mu0", None),
        rho=vals.pop("solver_rho", 1.5),
        tol=vals.pop("solver_tol", 1e-7),
        max_iter=vals.pop("solver_max_iter", 100),
    )
    sigma = (vals.pop("sigma_x", 3.0), vals.pop("sigma_y", 3.0),
             vals.pop("sigma_s", 0.005))
    return TrackerConfig(sigma=sigma, solver=solver, **vals)


def load_synthetic_spec(path: str | None) -> SyntheticSpec:
    if path is None:
        return SyntheticSpec()
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    valid = set(SyntheticSpec.__dataclass_fields__)
    unknown = set(raw) - valid
    if unknown:
        raise ValueError(f"unknown synthetic spec keys: {sorted(unknown)}")
    return SyntheticSpec(**raw)


def write_boxes_csv(trajectory: list[FrameResult], path: Path) -> None:
    lines = [BOXES_HEADER]
    for k, fr in enumerate(trajectory):
        x, y, w, h = fr.bbox
        err = 0.0 if not fr.per_candidate else min(
            s.err for s in fr.per_candidate)
        iters = 0
        if fr.per_candidate:
            best = min(fr.per_candidate, key=lambda s: s.err)
            err, iters = best.err, best.iterations
        lines.append(",".join([str(k), repr(float(x)), repr(float(y)),
                               repr(float(w)), repr(float(h)),
                               repr(float(fr.score)), repr(float(err)),
                               str(iters)]))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_boxes_csv(path: Path) -> np.ndarray:
    lines = path.read_text(encoding="utf-8").strip().splitlines()
    if not lines or lines[0] != BOXES_HEADER:
        raise ValueError(f"{path} is not a boxes.csv file")
    rows = [line.split(",") for line in lines[1:]]
    return np.array([[float(r[1]), float(r[2]), float(r[3]), float(r[4])]
                     for r in rows])


def write_metrics(report, path: Path) -> None:
    path.write_text(json.dumps(report.as_dict(), indent=2, sort_keys=True)
                    + "\n", encoding="utf-8")


def _render_overlays(frames, trajectory, gt, out_dir: Path, patch_h, patch_w):
    overlay_dir = out_dir / "overlay"
    mask_dir = out_dir / "mask"
    overlay_dir.mkdir(parents=True, exist_ok=True)
    mask_dir.mkdir(parents=True, exist_ok=True)
    for k, (frame, fr) in enumerate(zip(frames, trajectory)):
        img = Image.fromarray(
            np.clip(frame * 255.0 + 0.5, 0, 255).astype(np.uint8)).convert("RGB")
        draw = ImageDraw.Draw(img)
        x, y, w, h = fr.bbox
        draw.rectangle([x, y, x + w, y + h], outline=(255, 0, 0))
        if gt is not None and k < len(gt):
            gx, gy, gw, gh = gt.boxes[k]
            draw.rectangle([gx, gy, gx + gw, gy + gh], outline=(0, 255, 0))
        img.save(overlay_dir / f"{k:06d}.png")

        # observed pixels of the tracked patch, shown in red on the patch
        patch = vector_to_patch(
            np.clip(1.0 - fr.err_map, 0.0, 1.0), patch_h, patch_w)
        rgb = np.stack([patch] * 3, axis=-1)
        # mask indices are column-major: index = col * patch_h + row
        rows = fr.omega % patch_h
        cols = fr.omega // patch_h
        rgb[rows, cols] = (1.0, 0.15, 0.15)
        big = np.kron(rgb, np.ones((8, 8, 1)))
        Image.fromarray(
            np.clip(big * 255.0 + 0.5, 0, 255).astype(np.uint8)).save(
                mask_dir / f"{k:06d}.png")


def cmd_track(args) -> int:
    cfg = load_tracker_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.workers is not None:
        cfg.workers = args.workers
    frames = load_sequence(args.seq)
    gt = load_groundtruth(args.gt)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    trajectory = run_tracker(frames, gt.boxes[0], cfg)
    write_boxes_csv(trajectory, out / "boxes.csv")
    if len(gt) == len(frames):
        pred = read_boxes_csv(out / "boxes.csv")
        write_metrics(build_report(pred, gt), out / "metrics.json")
    if args.overlay:
        _render_overlays(frames, trajectory, gt, out, cfg.patch_h, cfg.patch_w)
    print(f"tracked {len(frames)} frames -> {out / 'boxes.csv'}")
    return 0


def cmd_eval(args) -> int:
    out = Path(args.out)
    boxes_path = out / "boxes.csv"
    if not boxes_path.exists():
        raise FileNotFoundError(f"no boxes.csv under {out}; run track first")
    pred = read_boxes_csv(boxes_path)
    gt = load_groundtruth(args.gt, expected_count=pred.shape[0])
    report = build_report(pred, gt)
    write_metrics(report, out / "metrics.json")
    print(f"frames={pred.shape[0]} mean_tle={report.mean_tle:.3f} "
          f"precision@20={report.precision_at():.3f} "
          f"mean_or={report.mean_or:.3f} sr@0.5={report.sr_at():.3f}")
    return 0


def cmd_synth(args) -> int:
    spec = load_synthetic_spec(args.config)
    if args.seed is not None:
        spec.seed = args.seed
    frames, gt = generate_synthetic(spec)
    out = Path(args.out)
    save_sequence(frames, out / "img")
    save_groundtruth(gt, out / "groundtruth.txt")
    print(f"wrote {len(frames)} frames under {out}")
    return 0


def cmd_sweep(args) -> int:
    rates = [float(v) for v in args.sweep_obs_rate.split(",") if v]
    if not rates:
        raise ValueError("no observation rates given")
    cfg = load_tracker_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.workers is not None:
        cfg.workers = args.workers
    frames = load_sequence(args.seq)
    gt = load_groundtruth(args.gt, expected_count=len(frames))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    lines = ["obs_rate,mean_tle,median_tle,mean_or,precision_20,sr_05"]
    for rate in rates:
        cfg.obs_rate = rate
        trajectory = run_tracker(frames, gt.boxes[0], cfg)
        pred = np.array([fr.bbox for fr in trajectory])
        report = build_report(pred, gt)
        lines.append(",".join([repr(rate), repr(report.mean_tle),
                               repr(report.median_tle), repr(report.mean_or),
                               repr(report.precision_at()),
                               repr(report.sr_at())]))
        print(f"obs_rate={rate}: mean_tle={report.mean_tle:.2f} "
              f"mean_or={report.mean_or:.3f}")
    (out / "sweep.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mctracker",
        description="matrix-completion appearance tracker")
    sub = parser.add_subparsers(dest="verb", required=True)

    track = sub.add_parser("track", help="run the tracker over a sequence")
    track.add_argument("--config", help="flat JSON tracker config")
    track.add_argument("--seq", required=True, help="sequence directory")
    track.add_argument("--gt", required=True,
                       help="ground-truth boxes, first line initializes")
    track.add_argument("--out", required=True, help="output directory")
    track.add_argument("--seed", type=int)
    track.add_argument("--workers", type=int)
    track.add_argument("--overlay", action="store_true",
                       help="write annotated frames and mask views")
    track.set_defaults(func=cmd_track)

    ev = sub.add_parser("eval", help="compute metrics for tracked boxes")
    ev.add_argument("--gt", required=True)
    ev.add_argument("--out", required=True,
                    help="directory holding boxes.csv; metrics.json is "
                         "written next to it")
    ev.set_defaults(func=cmd_eval)

    synth = sub.add_parser("synth", help="generate a synthetic sequence")
    synth.add_argument("--config", help="flat JSON synthetic spec")
    synth.add_argument("--out", required=True)
    synth.add_argument("--seed", type=int)
    synth.set_defaults(func=cmd_synth)

    sweep = sub.add_parser("sweep", help="rerun tracking across obs rates")
    sweep.add_argument("--config")
    sweep.add_argument("--seq", required=True)
    sweep.add_argument("--gt", required=True)
    sweep.add_argument("--out", required=True)
    sweep.add_argument("--seed", type=int)
    sweep.add_argument("--workers", type=int)
    sweep.add_argument("--sweep-obs-rate", required=True,
                       help="comma separated list, e.g. 0.3,0.5,0.7,0.9")
    sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
