#!/usr/bin/env python3
"""Build a small MNIST fixture in IDX format.

Source: the digit JSON files shipped in the `mnist` npm package
(https://www.npmjs.com/package/mnist, 10 files `src/digits/<d>.json`, each a
flat list of 784 * n grayscale values already divided by 255 and rounded to
three decimals). The pixels are mapped back to bytes with round(v * 255).

For each digit the first 85% of its images go to the train files and the
remainder to the test files. Output files follow the official naming.

    npm pack mnist && tar xzf mnist-*.tgz
    python3 tools/make_mnist_fixture.py package/src/digits data/mnist-subset
"""
import json
import struct
import sys
from pathlib import Path

TRAIN_FRACTION = 0.85


def write_images(path, images):
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, len(images), 28, 28))
        for img in images:
            f.write(bytes(img))


def write_labels(path, labels):
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 0x00000801, len(labels)))
        f.write(bytes(labels))


def main():
    src, dst = Path(sys.argv[1]), Path(sys.argv[2])
    dst.mkdir(parents=True, exist_ok=True)
    train, test = [], []
    for digit in range(10):
        flat = json.loads((src / f"{digit}.json").read_text())["data"]
        n = len(flat) // 784
        imgs = [[min(255, max(0, round(v * 255))) for v in flat[i * 784:(i + 1) * 784]] for i in range(n)]
        cut = int(n * TRAIN_FRACTION)
        train += [(img, digit) for img in imgs[:cut]]
        test += [(img, digit) for img in imgs[cut:]]
    # interleave digits deterministically so files are not sorted by class
    for name, rows in (("train", train), ("t10k", test)):
        rows = sorted(enumerate(rows), key=lambda r: ((r[0] * 2654435761) % 4294967296))
        write_images(dst / f"{name}-images-idx3-ubyte", [r[1][0] for r in rows])
        write_labels(dst / f"{name}-labels-idx1-ubyte", [r[1][1] for r in rows])
        print(name, len(rows))


if __name__ == "__main__":
    main()
