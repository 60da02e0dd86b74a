"""Direct arithmetic meanings of the bundled corpus programs (test oracle)."""

from __future__ import annotations


def blen(n: int) -> int:
    return n.bit_length()


def ones(x):
    return (1 << blen(x)) - 1


def append(x, y):
    return (y << blen(x)) | x


def sticky(x, y):
    r = y
    for b in bin(x)[2:] if x else "":
        r = 2 * r + 1 if b == "1" else (y if r == 0 else r)
    return r


def deep(x):
    r, prefix = 0, 0
    for b in bin(x)[2:] if x else "":
        r = append(ones(prefix), r)
        prefix = 2 * prefix + int(b)
    return r


# name -> function of (normals..., safes...)
MEANING = {
    "zero11": lambda x, y: 0,
    "proj3": lambda x, y1, y2: y2,
    "select": lambda y, a, b: a if y == 0 else b,
    "quad": lambda y: 4 * y,
    "half2": lambda y: y // 4,
    "orelse": lambda y1, y2: y2 if y1 == 0 else y1,
    "nest": lambda y1, y2, y3: y2 // 2 if y1 == 0 else 2 * y3 + 1,
    "lnest": lambda y1, y2, y3: y2 // 2 if y1 == 0 else 2 * y3 + 1,
    "ones": ones,
    "copy": lambda x: x,
    "append": append,
    "lsb": lambda x: x & 1,
    "nappend": append,
    "padones": lambda x, y: append(ones(x), y),
    "sticky": sticky,
    "deep": deep,
}
