#!/usr/bin/env python3
"""Parameter counts of the two networks from shape arithmetic alone.

Usage: param_count.py [expected_gesture expected_grasp]
Prints both counts; with arguments, exits non-zero on mismatch.
"""
import sys


def conv(h, w, c, kh, kw, f):
    return (h - kh + 1, w - kw + 1, f), kh * kw * c * f + f


def gesture(t=60, channels=6):
    shape = (t, channels, 1)
    total = 0
    for kh, kw, f in ((5, 2, 32), (3, 2, 64), (3, 2, 128)):
        shape, n = conv(*shape, kh, kw, f)
        total += n
    h, w, c = shape
    flat = (h // 2) * w * c  # 2x1 max pool
    total += flat * 128 + 128
    total += 128 * 3 + 3
    return total


def grasp():
    trunk = 1 * 1 * 1 * 16 + 16
    branch = 16 * 16 + 16
    return trunk + 2 * branch + (16 * 3 + 3) + (16 * 1 + 1)


def main():
    g, f = gesture(), grasp()
    print(f"gesture_cnn(T=60) {g}")
    print(f"grasp_force_net {f}")
    if len(sys.argv) == 3:
        want = (int(sys.argv[1]), int(sys.argv[2]))
        if (g, f) != want:
            print(f"mismatch: expected {want}", file=sys.stderr)
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
