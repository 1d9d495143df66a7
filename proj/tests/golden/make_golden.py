"""Writes the golden files from the layouts in docs/formats.md.

Independent of the C++ encoders; rerun only when a format changes.
"""
import pathlib
import struct

HERE = pathlib.Path(__file__).parent


def cloud():
    points = [((1.0, -2.0, 0.5), 18), ((10.25, 0.0, -1.75), 14), ((-3.5, 4.125, 0.0625), 22)]
    out = b"CSC1" + struct.pack("<I", len(points))
    for (x, y, z), label in points:
        out += struct.pack("<fffI", x, y, z, label)
    return out


def spec(shape):
    return struct.pack("<6d", -1.0, 1.0, -1.0, 1.0, -0.5, 0.5) + struct.pack("<3I", *shape)


def grid():
    labels = [0, 6, 255, 1, 255, 255, 10, 5]
    valid = [1, 1, 0, 1, 0, 0, 1, 1]
    return b"CSG1" + spec((2, 2, 2)) + bytes(labels) + bytes(valid)


def stack():
    layers = [{0, 5, 11}, {3, 8}]
    out = b"CST1" + struct.pack("<I", len(layers)) + spec((2, 2, 3))
    for bits in layers:
        packed = bytearray(2)
        for i in bits:
            packed[i // 8] |= 1 << (i % 8)
        out += bytes(packed)
    return out


def poses():
    return "1 0 0 0 0 1 0 0 0 0 1 0\n0 -1 0 1.5 1 0 0 -2 0 0 1 0.25\n"


if __name__ == "__main__":
    (HERE / "cloud.bin").write_bytes(cloud())
    (HERE / "grid.bin").write_bytes(grid())
    (HERE / "stack.bin").write_bytes(stack())
    (HERE / "poses.txt").write_text(poses())
