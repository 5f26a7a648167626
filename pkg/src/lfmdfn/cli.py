"""Command line interface: train, eval, sr, filters, epi.

Exit codes: 0 success, 2 bad usage/validation/missing input, 3 output not
writable, 1 unexpected failure.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
import traceback
from pathlib import Path

import numpy as np
from PIL import Image

from .core.io import FormatError, load_lf, save_lf
from .core.lightfield import DimensionError, LightField4D, PlaneKind, view_epi
from .estimator import MDFNSuperResolver
from .evaluation import evaluate_dataset
from .kvconfig import ConfigError
from .model.checkpoint import load_checkpoint
from .model.network import count_parameters, dfb_forward, mdfn_features, super_resolve
from .autodiff.tensor import no_grad
from .training.config import parse_run_config
from .training.data import DatasetError, default_cache_dir, ingest_dataset
from .training.loop import TrainingError, train_loop


def _pair_arg(text: str):
    try:
        a, b = text.split(",")
        return int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'A,B' integers, got {text!r}") from None


def _load_any(path: str, angular):
    return load_lf(path, angular=angular)


# -- subcommands -----------------------------------------------------------------


def cmd_train(args) -> int:
    text = Path(args.config).read_text()
    train_cfg, model_cfg = parse_run_config(text)
    if args.seed is not None:
        train_cfg.seed = args.seed
        model_cfg.seed = args.seed
    if args.deterministic:
        train_cfg.deterministic = True
    final = train_loop(train_cfg, model_cfg, args.out, resume=args.resume)
    print(f"training complete: {final}")
    return 0


def cmd_eval(args) -> int:
    if args.oracle:
        scale = args.scale or 2
        ck = None
    else:
        if not args.checkpoint:
            raise ConfigError("eval requires --checkpoint (or --oracle)")
        ck = load_checkpoint(args.checkpoint)
        scale = ck.model_cfg.r
        if args.scale and args.scale != scale:
            raise ConfigError(
                f"--scale {args.scale} does not match checkpoint r={scale}"
            )
    dataset = ingest_dataset(args.dataset, scale, cache_dir=default_cache_dir())
    if args.oracle:
        report = evaluate_dataset(dataset, None, scale, oracle=True)
    else:
        predict = lambda lr: super_resolve(lr, ck.params, ck.model_cfg)  # noqa: E731
        report = evaluate_dataset(
            dataset, predict, scale,
            param_count=count_parameters(ck.model_cfg),
            config_echo=ck.model_cfg.to_text(),
        )
    print(report.table())
    if args.out:
        payload = report.to_json() if args.format == "json" else report.to_csv()
        Path(args.out).write_text(payload)
        print(f"wrote {args.out}")
    return 0


def cmd_sr(args) -> int:
    est = MDFNSuperResolver.from_checkpoint(args.checkpoint)
    lf = _load_any(args.lf, args.angular)
    t0 = time.monotonic()
    sr = est.predict(lf)
    dt = time.monotonic() - t0
    save_lf(sr, args.out)
    print(f"{lf.shape} -> {sr.shape} in {dt:.2f}s; wrote {args.out}")
    return 0


def _luma_lf(lf: LightField4D) -> LightField4D:
    if lf.C == 1:
        return lf
    from .core.color import rgb_to_ycbcr

    return LightField4D(rgb_to_ycbcr(lf.data)[..., :1])


def cmd_filters(args) -> int:
    ck = load_checkpoint(args.checkpoint)
    if ck.model_cfg.upsampler != "dynamic_filter":
        raise ConfigError("checkpoint uses the deconvolution upsampler; no filters to inspect")
    lf = _luma_lf(_load_any(args.lf, args.angular))
    u, v = args.view
    x, y = args.pixel
    if not (0 <= u < lf.U and 0 <= v < lf.V):
        raise DimensionError(f"view ({u}, {v}) out of range for {lf.U}x{lf.V}")
    if not (0 <= x < lf.X and 0 <= y < lf.Y):
        raise DimensionError(f"pixel ({x}, {y}) out of range for {lf.X}x{lf.Y}")
    cfg = ck.model_cfg
    with no_grad():
        filt = dfb_forward(mdfn_features(lf, ck.params, cfg), ck.params, cfg).data
    r, d = cfg.r, cfg.d
    tiles = [
        filt[u, v, r * x + dx, r * y + dy] for dx in range(r) for dy in range(r)
    ]
    # r x r grid of d x d tiles, 1-pixel separators, shared color scale.
    peak = max(float(t.max()) for t in tiles)
    grid = np.full((r * d + r - 1, r * d + r - 1), peak, dtype=np.float64)
    for i, t in enumerate(tiles):
        gx, gy = divmod(i, r)
        grid[gx * (d + 1) : gx * (d + 1) + d, gy * (d + 1) : gy * (d + 1) + d] = t
    img = (np.clip(grid / peak if peak > 0 else grid, 0, 1) * 255).round().astype(np.uint8)
    upscale = 16
    img = img.repeat(upscale, axis=0).repeat(upscale, axis=1)
    out = Path(args.out)
    Image.fromarray(img, mode="L").save(out)
    dump = {
        "view": [u, v],
        "pixel": [x, y],
        "r": r,
        "d": d,
        "filters": [t.tolist() for t in tiles],
        "sums": [float(t.sum()) for t in tiles],
    }
    out.with_suffix(".json").write_text(json.dumps(dump, indent=2))
    print(f"wrote {out} and {out.with_suffix('.json')}")
    return 0


def cmd_epi(args) -> int:
    lf = _load_any(args.lf, args.angular)
    kind = PlaneKind.EPI_HORIZONTAL if args.kind == "h" else PlaneKind.EPI_VERTICAL
    a, b = args.index
    epi = view_epi(lf, kind, a, b)
    img = np.clip(epi * args.scale, 0.0, 1.0)
    q = (img * 255).round().astype(np.uint8)
    if q.shape[-1] == 1:
        Image.fromarray(q[..., 0], mode="L").save(args.out)
    else:
        Image.fromarray(q, mode="RGB").save(args.out)
    print(f"wrote {args.out} ({epi.shape[0]}x{epi.shape[1]})")
    return 0


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lfmdfn",
                                description="Light field spatial super-resolution")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train a model from a run config")
    t.add_argument("--config", required=True, help="key=value run config file")
    t.add_argument("--out", default="runs/mdfn", help="output directory")
    t.add_argument("--seed", type=int, default=None, help="override config seed")
    t.add_argument("--deterministic", action="store_true",
                   help="zero the elapsed_ms column for byte-identical logs")
    t.add_argument("--resume", default=None, help="checkpoint to resume from")
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("eval", help="score a checkpoint on a dataset")
    e.add_argument("--checkpoint", default=None)
    e.add_argument("--dataset", required=True, help="dataset root directory")
    e.add_argument("--scale", type=int, default=None, help="expected upscale factor")
    e.add_argument("--out", default=None, help="metrics file")
    e.add_argument("--format", choices=("csv", "json"), default="csv")
    e.add_argument("--oracle", action="store_true",
                   help="score ground truth against itself (sanity baseline)")
    e.set_defaults(func=cmd_eval)

    s = sub.add_parser("sr", help="super-resolve one light field")
    s.add_argument("lf", help="input light field path")
    s.add_argument("--checkpoint", required=True)
    s.add_argument("--out", required=True, help="output light field path")
    s.add_argument("--angular", type=_pair_arg, default=None,
                   help="U,V hint for lenslet-grid PNG inputs")
    s.set_defaults(func=cmd_sr)

    f = sub.add_parser("filters", help="render the dynamic filters of one LR pixel")
    f.add_argument("lf", help="input light field path")
    f.add_argument("--checkpoint", required=True)
    f.add_argument("--view", type=_pair_arg, required=True, help="u,v view index")
    f.add_argument("--pixel", type=_pair_arg, required=True, help="x,y LR pixel")
    f.add_argument("--out", required=True, help="output image path (.png)")
    f.add_argument("--angular", type=_pair_arg, default=None)
    f.set_defaults(func=cmd_filters)

    x = sub.add_parser("epi", help="export one epipolar plane image")
    x.add_argument("lf", help="input light field path")
    x.add_argument("--kind", choices=("h", "v"), required=True)
    x.add_argument("--index", type=_pair_arg, required=True,
                   help="fixed indices: u,x for h; v,y for v")
    x.add_argument("--out", required=True, help="output image path")
    x.add_argument("--scale", type=float, default=1.0, help="contrast multiplier")
    x.add_argument("--angular", type=_pair_arg, default=None)
    x.set_defaults(func=cmd_epi)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as e:
        print(f"error: missing input: {e}", file=sys.stderr)
        return 2
    except (ConfigError, DimensionError, DatasetError, FormatError,
            TrainingError, ValueError, IndexError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except PermissionError as e:
        print(f"error: output not writable: {e}", file=sys.stderr)
        return 3
    except OSError as e:
        print(f"error: I/O failure: {e}", file=sys.stderr)
        return 3
    except Exception:
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
