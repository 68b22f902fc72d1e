#!/usr/bin/env python3
"""Reference writer for the PTYA container; regenerates the golden fixtures."""
import struct
from pathlib import Path

HERE = Path(__file__).resolve().parent


def header(dtype, dims):
    out = b"PTYA" + struct.pack("<HHH", 1, dtype, len(dims))
    for d in dims:
        out += struct.pack("<Q", d)
    return out


def main():
    real = [0.5, -1.5, 3.25, 1e-3]
    buf = header(1, (2, 2)) + b"".join(struct.pack("<d", v) for v in real)
    (HERE / "golden_f64.ptya").write_bytes(buf)

    buf = header(2, (2, 3))
    for r in range(2):
        for c in range(3):
            buf += struct.pack("<dd", r * 10.0 + c, -(r + c) / 2.0)
    (HERE / "golden_c128.ptya").write_bytes(buf)


if __name__ == "__main__":
    main()
