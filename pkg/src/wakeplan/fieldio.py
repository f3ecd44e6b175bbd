"""Binary flow-field files (WPF1 format).

Layout, all little-endian (documented in docs/format.md):

    magic   4 bytes  b"WPF1"
    header  u32 nx, u32 ny, u32 nz, f64 extent,
            f64 flow_speed, f64 flow_angle, u64 seed
    payload nx*ny*nz f64 speeds with x varying fastest,
            then nx*ny*nz occupancy bytes (0/1)
    crc     u32 CRC32 of the payload bytes

The same format is the import path for externally produced (e.g. CFD)
fields: anything that writes this header and payload reads back as a
regular FlowField.
"""

from pathlib import Path
import struct
import zlib

import numpy as np

from .errors import ChecksumError, FormatError, TruncatedFileError
from .fields import FlowField, GridSpec, ScenarioParams

MAGIC = b"WPF1"
_HEADER = struct.Struct("<IIIdddQ")


def write_field(f: FlowField, path) -> None:
    """Serialize a field; round-trips bitwise through read_field."""
    spec, sc = f.spec, f.scenario
    header = _HEADER.pack(
        spec.nx, spec.ny, spec.nz, spec.extent,
        sc.flow_speed, sc.flow_angle, sc.seed,
    )
    # x fastest on disk = Fortran raveling of the [ix, iy, iz] arrays
    payload = f.speed.ravel(order="F").astype("<f8").tobytes()
    payload += f.occupied.ravel(order="F").astype(np.uint8).tobytes()
    crc = zlib.crc32(payload)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(header)
        fh.write(payload)
        fh.write(struct.pack("<I", crc))


def read_field(path) -> FlowField:
    """Read a WPF1 file back into a FlowField.

    Raises FormatError on a bad magic/version, TruncatedFileError when
    the file is shorter than its header promises, and ChecksumError when
    the payload CRC32 does not match.
    """
    data = Path(path).read_bytes()
    if len(data) < 4 or data[:3] != MAGIC[:3]:
        raise FormatError(f"{path}: not a wakeplan field file")
    if data[:4] != MAGIC:
        raise FormatError(
            f"{path}: unsupported field format version {data[3:4]!r}"
        )
    off = 4
    if len(data) < off + _HEADER.size:
        raise TruncatedFileError(f"{path}: header truncated")
    nx, ny, nz, extent, flow_speed, flow_angle, seed = _HEADER.unpack_from(
        data, off
    )
    off += _HEADER.size
    n = nx * ny * nz
    payload_len = 8 * n + n
    if len(data) < off + payload_len + 4:
        raise TruncatedFileError(
            f"{path}: expected {off + payload_len + 4} bytes, got {len(data)}"
        )
    payload = data[off : off + payload_len]
    (crc_stored,) = struct.unpack_from("<I", data, off + payload_len)
    if zlib.crc32(payload) != crc_stored:
        raise ChecksumError(f"{path}: payload CRC mismatch")
    speed = np.frombuffer(payload[: 8 * n], dtype="<f8").reshape(
        (nx, ny, nz), order="F"
    )
    occupied = (
        np.frombuffer(payload[8 * n :], dtype=np.uint8)
        .reshape((nx, ny, nz), order="F")
        .astype(bool)
    )
    spec = GridSpec(nx=nx, ny=ny, nz=nz, extent=extent)
    scenario = ScenarioParams(flow_speed=flow_speed, flow_angle=flow_angle, seed=seed)
    return FlowField(spec, speed.copy(), occupied, scenario)
