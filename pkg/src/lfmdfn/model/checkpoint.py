"""Checkpoint archive: config echo plus named float32 parameter records.

Layout (all little-endian):

    magic "MDFNCKPT" | version u32 | model-config blob | train-config blob
    | record count u32 | records...

A blob is a u32 byte length plus UTF-8 text (length 0 means absent).  Each
record is a u16 name length, the name, u32 ndim, u32 dims, then the float32
payload.  Optimizer state rides along as records under the reserved
``opt.`` prefix (step counter, then first/second moments per parameter).
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..autodiff.optim import AdamState, ParamStore
from ..autodiff.tensor import Tensor
from ..core.io import FormatError
from .config import MDFNConfig

_MAGIC = b"MDFNCKPT"
_VERSION = 1


def _pack_record(name: str, arr: np.ndarray) -> bytes:
    nb = name.encode("utf-8")
    payload = np.ascontiguousarray(arr, dtype="<f4")
    head = struct.pack("<H", len(nb)) + nb
    head += struct.pack("<I", payload.ndim)
    head += struct.pack(f"<{payload.ndim}I", *payload.shape)
    return head + payload.tobytes()


def save_checkpoint(path, params: ParamStore, model_cfg: MDFNConfig,
                    train_cfg=None, opt_state: AdamState | None = None) -> None:
    records = [(name, p.data) for name, p in params.items()]
    if opt_state is not None:
        records.append(("opt.step", np.asarray(float(opt_state.step), dtype=np.float32)))
        for name, _ in params.items():
            records.append((f"opt.m.{name}", opt_state.m[name]))
            records.append((f"opt.v.{name}", opt_state.v[name]))
    model_blob = model_cfg.to_text().encode("utf-8")
    train_blob = (train_cfg.to_text() if train_cfg is not None else "").encode("utf-8")
    out = bytearray()
    out += _MAGIC
    out += struct.pack("<I", _VERSION)
    out += struct.pack("<I", len(model_blob)) + model_blob
    out += struct.pack("<I", len(train_blob)) + train_blob
    out += struct.pack("<I", len(records))
    for name, arr in records:
        out += _pack_record(name, arr)
    Path(path).write_bytes(bytes(out))


@dataclass
class CheckpointData:
    params: ParamStore
    model_cfg: MDFNConfig
    train_cfg: object  # TrainConfig or None
    opt_state: AdamState | None


class _Reader:
    def __init__(self, blob: bytes, path):
        self.blob = blob
        self.pos = 0
        self.path = path

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.blob):
            raise FormatError(f"{self.path}: truncated checkpoint")
        out = self.blob[self.pos : self.pos + n]
        self.pos += n
        return out

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def u16(self) -> int:
        return struct.unpack("<H", self.take(2))[0]


def load_checkpoint(path) -> CheckpointData:
    from ..training.config import TrainConfig

    path = Path(path)
    rd = _Reader(path.read_bytes(), path)
    if rd.take(8) != _MAGIC:
        raise FormatError(f"{path}: not a checkpoint (bad magic)")
    version = rd.u32()
    if version != _VERSION:
        raise FormatError(f"{path}: unsupported checkpoint version {version}")
    model_cfg = MDFNConfig.from_text(rd.take(rd.u32()).decode("utf-8"))
    train_text = rd.take(rd.u32()).decode("utf-8")
    train_cfg = TrainConfig.from_text(train_text) if train_text else None

    named = {}
    order = []
    for _ in range(rd.u32()):
        name = rd.take(rd.u16()).decode("utf-8")
        ndim = rd.u32()
        shape = tuple(rd.u32() for _ in range(ndim))
        count = int(np.prod(shape)) if shape else 1
        arr = np.frombuffer(rd.take(4 * count), dtype="<f4").reshape(shape).copy()
        if name in named:
            raise FormatError(f"{path}: duplicate record {name!r}")
        named[name] = arr
        order.append(name)
    if rd.pos != len(rd.blob):
        raise FormatError(f"{path}: {len(rd.blob) - rd.pos} trailing bytes")

    params = ParamStore()
    for name in order:
        if not name.startswith("opt."):
            params.add(name, Tensor(named[name], requires_grad=True))

    opt_state = None
    if "opt.step" in named:
        lr = train_cfg.lr if train_cfg is not None else 1e-4
        opt_state = AdamState(lr=lr, step=int(named["opt.step"].reshape(-1)[0]))
        for name, _ in params.items():
            try:
                opt_state.m[name] = named[f"opt.m.{name}"]
                opt_state.v[name] = named[f"opt.v.{name}"]
            except KeyError:
                raise FormatError(f"{path}: missing optimizer moments for {name!r}") from None
    return CheckpointData(params=params, model_cfg=model_cfg, train_cfg=train_cfg,
                          opt_state=opt_state)
