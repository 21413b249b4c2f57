#!/usr/bin/env python3
"""Rewrites models/bundle.lock after editing a bundled document."""
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent
FILES = ["models/xbar.model.json", "lexicons/english.tsv", "corpora/demo_sentences.txt"]


def fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


lines = [f"fnv1a64 {fnv1a64((ROOT / f).read_bytes()):016x} {f}" for f in FILES]
(ROOT / "models" / "bundle.lock").write_text("\n".join(lines) + "\n")
print("\n".join(lines))
