# Global imports
from __future__ import annotations

import logging
import os
import struct
import zlib
from pathlib import Path
from typing import Optional, Union

import numpy as np

from phonon_diffusion.kernel.parameters_kernel import KernelError, KernelTable, WaveGrid

MAGIC = b"PHNK"
FORMAT_VERSION = 1
CACHE_DIR_ENV = "PHONON_CACHE_DIR"

_HEADER = struct.Struct("<4sBId")
_TRAILER = struct.Struct("<3d")
_CRC = struct.Struct("<I")

PathLike = Union[str, os.PathLike]


class KernelCacheError(KernelError):
    """Cache file is truncated, corrupted or written by another format version."""


def cache_filename(n: int, quad_tol: float) -> str:
    return f"kernel_n{n}_tol{quad_tol:.0e}.phnk"


def default_cache_dir(override: Optional[PathLike] = None) -> Path:
    if override:
        return Path(override)
    return Path(os.environ.get(CACHE_DIR_ENV, ".phonon_cache"))


def encode_table(table: KernelTable) -> bytes:
    n = table.n
    body = b"".join(
        [
            _HEADER.pack(MAGIC, FORMAT_VERSION, n, table.quad_tol),
            np.ascontiguousarray(table.grid.nodes, dtype="<f8").tobytes(),
            np.ascontiguousarray(table.grid.weights, dtype="<f8").tobytes(),
            np.ascontiguousarray(table.V, dtype="<f8").tobytes(),
            np.ascontiguousarray(table.K, dtype="<f8").tobytes(order="C"),
            _TRAILER.pack(table.v0, table.c1, table.c2),
        ]
    )
    return body + _CRC.pack(zlib.crc32(body) & 0xFFFFFFFF)


def decode_table(blob: bytes) -> KernelTable:
    if len(blob) < _HEADER.size + _TRAILER.size + _CRC.size:
        raise KernelCacheError(f"cache blob too short ({len(blob)} bytes)")
    magic, version, n, quad_tol = _HEADER.unpack_from(blob, 0)
    if magic != MAGIC:
        raise KernelCacheError(f"bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise KernelCacheError(f"unsupported cache version {version}")
    if n < 2 or n % 2:
        raise KernelCacheError(f"header declares an invalid grid size n={n}")
    expected = _HEADER.size + 8 * (3 * n + n * n) + _TRAILER.size + _CRC.size
    if len(blob) != expected:
        raise KernelCacheError(f"cache length {len(blob)} != {expected} for n={n}")
    body, (stored_crc,) = blob[: -_CRC.size], _CRC.unpack(blob[-_CRC.size :])
    if zlib.crc32(body) & 0xFFFFFFFF != stored_crc:
        raise KernelCacheError("CRC mismatch")

    offset = _HEADER.size

    def take(count: int) -> np.ndarray:
        nonlocal offset
        array = np.frombuffer(blob, dtype="<f8", count=count, offset=offset)
        offset += 8 * count
        return array.astype(float)

    nodes = take(n)
    take(n)
    V = take(n)
    K = take(n * n).reshape(n, n)
    v0, c1, c2 = _TRAILER.unpack_from(blob, offset)

    grid = WaveGrid(n)
    if not np.array_equal(nodes, grid.nodes):
        raise KernelCacheError("stored nodes do not match the midpoint grid")
    return KernelTable(grid=grid, K=K, V=V, v0=v0, c1=c1, c2=c2, quad_tol=quad_tol)


def save_table(table: KernelTable, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp_path = path.with_suffix(path.suffix + ".tmp")
    tmp_path.write_bytes(encode_table(table))
    os.replace(tmp_path, path)
    logging.info(f"Kernel table written to {path}")
    return path


def load_table(path: PathLike) -> KernelTable:
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as err:
        raise KernelCacheError(f"cannot read {path}: {err}") from err
    table = decode_table(blob)
    logging.info(f"Kernel table n={table.n} loaded from {path}")
    return table
