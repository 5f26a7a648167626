"""The training loop: gradient accumulation, checkpoints, resumability.

Gradients are accumulated one patch at a time with the loss scaled by 1/B,
which keeps the peak memory of a step at a single patch's graph.  Each
step draws its batch from a generator seeded by (seed, 1, step), so a
resumed run replays exactly the batches an uninterrupted run would have
seen; no RNG state needs to be serialized.
"""
from __future__ import annotations

import shutil
import time
from pathlib import Path

import numpy as np

from ..autodiff.functional import l1_loss
from ..autodiff.optim import AdamState, ParamStore, adam_step
from ..autodiff.tensor import Tensor
from ..model.checkpoint import load_checkpoint, save_checkpoint
from ..model.config import MDFNConfig
from ..model.network import build_params, forward
from .config import TrainConfig
from .data import ingest_dataset, sample_batch


class TrainingError(RuntimeError):
    """Training aborted: bad state, diverged loss, or config mismatch."""


def train_step(params: ParamStore, state: AdamState, batch, model_cfg: MDFNConfig) -> float:
    """Forward/backward over one batch, one Adam step; returns the
    pre-step mean L1 loss."""
    bsz = len(batch)
    params.zero_grad()
    total = 0.0
    for sample in batch:
        x = Tensor(sample.lr_patch.data[..., 0])
        target = sample.hr_patch.data[..., 0]
        pred = forward(x, params, model_cfg)
        loss = l1_loss(pred, target)
        (loss * (1.0 / bsz)).backward()
        total += loss.item()
    mean_loss = total / bsz
    if not np.isfinite(mean_loss):
        raise TrainingError(f"non-finite loss {mean_loss!r}")
    adam_step(params, state)
    return mean_loss


def _step_rng(seed: int, step: int) -> np.random.Generator:
    return np.random.default_rng([seed, 1, step])


def train_loop(cfg: TrainConfig, model_cfg: MDFNConfig, out_dir, resume=None,
               dataset=None, progress=None) -> Path:
    """Run (or resume) training; returns the path of the final checkpoint.

    Emits ``loss_log.csv`` (step, loss, lr, elapsed_ms) and periodic
    ``ckpt_{step:08d}.mdfn`` files plus a ``final.mdfn`` copy under
    ``out_dir``.  ``resume`` takes a checkpoint path and continues from its
    recorded step with bit-identical results under a fixed seed.
    """
    cfg.validate()
    model_cfg.validate()
    if model_cfg.r != cfg.r:
        raise TrainingError(f"model r={model_cfg.r} differs from training r={cfg.r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if dataset is None:
        dataset = ingest_dataset(cfg.dataset_root, cfg.r)

    if resume is not None:
        ck = load_checkpoint(resume)
        if ck.model_cfg != model_cfg:
            raise TrainingError(
                f"checkpoint model config {ck.model_cfg} differs from requested {model_cfg}"
            )
        if ck.opt_state is None:
            raise TrainingError(f"{resume}: checkpoint carries no optimizer state")
        params, state = ck.params, ck.opt_state
        state.lr = cfg.lr
        start = state.step
        if start >= cfg.iterations:
            raise TrainingError(
                f"checkpoint already at step {start} >= iterations {cfg.iterations}"
            )
    else:
        params = build_params(model_cfg)
        state = AdamState.init(params, lr=cfg.lr)
        start = 0

    log_path = out / "loss_log.csv"
    mode = "a" if (resume is not None and log_path.exists()) else "w"
    t0 = time.monotonic()
    final = out / "final.mdfn"
    with open(log_path, mode) as log:
        if mode == "w":
            log.write("step,loss,lr,elapsed_ms\n")
        for step in range(start, cfg.iterations):
            rng = _step_rng(cfg.seed, step)
            batch = sample_batch(dataset, cfg, rng)
            try:
                loss = train_step(params, state, batch, model_cfg)
            except TrainingError as e:
                raise TrainingError(f"step {step + 1}: {e}") from e
            elapsed = 0 if cfg.deterministic else int((time.monotonic() - t0) * 1000)
            log.write(f"{step + 1},{loss:.8e},{cfg.lr:.3e},{elapsed}\n")
            log.flush()
            if progress is not None:
                progress(step + 1, loss)
            if (step + 1) % cfg.checkpoint_interval == 0 or step + 1 == cfg.iterations:
                ck_path = out / f"ckpt_{step + 1:08d}.mdfn"
                save_checkpoint(ck_path, params, model_cfg, cfg, state)
    shutil.copyfile(out / f"ckpt_{cfg.iterations:08d}.mdfn", final)
    return final
