"""IQ slot frame codec for pipes and sockets.

Frame layout (little-endian):

    magic        4 bytes  b"OWIQ"
    version      u16
    flags        u16      bit0: 0 = int16 interleaved IQ, 1 = f32 interleaved IQ
    slot_index   u64
    sample_count u32
    payload      sample_count * 2 values (I, Q interleaved)

int16 payloads are written by rounding and symmetrically clamping to
[-32767, 32767]; the number of clipped samples is returned so run
statistics can track saturation.
"""

import struct

import numpy as np

from .errors import FormatError, InvalidInputError

STREAM_MAGIC = b"OWIQ"
STREAM_VERSION = 1

FLAG_F32 = 0x0001

INT16_FULL_SCALE = 32767

_HEADER = struct.Struct("<4sHHQI")

FMT_I16 = "i16"
FMT_F32 = "f32"


def write_frame(fh, slot_index, samples, fmt=FMT_I16):
    """Write one slot frame; returns the number of clipped samples (i16 only)."""
    samples = np.asarray(samples, dtype=np.complex128)
    clipped = 0
    if fmt == FMT_F32:
        flags = FLAG_F32
        inter = np.empty(2 * len(samples), dtype="<f4")
        inter[0::2] = samples.real
        inter[1::2] = samples.imag
    elif fmt == FMT_I16:
        flags = 0
        raw = np.empty(2 * len(samples))
        raw[0::2] = np.round(samples.real)
        raw[1::2] = np.round(samples.imag)
        clipped = int(np.count_nonzero(np.abs(raw) > INT16_FULL_SCALE))
        inter = np.clip(raw, -INT16_FULL_SCALE, INT16_FULL_SCALE).astype("<i2")
    else:
        raise InvalidInputError(f"frame format must be 'i16' or 'f32', got {fmt!r}")
    fh.write(_HEADER.pack(STREAM_MAGIC, STREAM_VERSION, flags,
                          slot_index, len(samples)))
    fh.write(inter.tobytes())
    return clipped


def _read_exact(fh, n):
    chunks = []
    got = 0
    while got < n:
        chunk = fh.read(n - got)
        if not chunk:
            break
        chunks.append(chunk)
        got += len(chunk)
    return b"".join(chunks)


def read_frame(fh):
    """Read one frame; returns (slot_index, samples, fmt) or None at clean EOF."""
    header = _read_exact(fh, _HEADER.size)
    if not header:
        return None
    if len(header) < _HEADER.size:
        raise FormatError(f"truncated frame header ({len(header)} bytes)",
                          offset=len(header))
    magic, version, flags, slot_index, count = _HEADER.unpack(header)
    if magic != STREAM_MAGIC:
        raise FormatError(f"bad frame magic {magic!r}", offset=0)
    if version != STREAM_VERSION:
        raise FormatError(f"unsupported frame version {version}", offset=4)
    fmt = FMT_F32 if flags & FLAG_F32 else FMT_I16
    width = 4 if fmt == FMT_F32 else 2
    payload = _read_exact(fh, count * 2 * width)
    if len(payload) < count * 2 * width:
        raise FormatError(
            f"truncated frame payload: slot {slot_index} needs {count * 2 * width} "
            f"bytes, got {len(payload)}",
            offset=_HEADER.size + len(payload),
        )
    dtype = "<f4" if fmt == FMT_F32 else "<i2"
    inter = np.frombuffer(payload, dtype=dtype).astype(np.float64)
    samples = inter[0::2] + 1j * inter[1::2]
    return slot_index, samples, fmt
