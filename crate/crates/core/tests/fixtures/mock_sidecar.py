#!/usr/bin/env python3
"""Deterministic stand-in for a neural scoring sidecar.

Words split into three-letter pieces; a piece's log probability depends
only on the previous token id and its own id.
"""
import json
import sys

WINDOW = 64
pieces = {}
names = []


def piece_id(p):
    if p not in pieces:
        pieces[p] = len(names)
        names.append(p)
    return pieces[p]


def logprob(prev, tok):
    h = (prev * 7919 + tok * 104729 + 13) % 1009
    return -(0.5 + h / 200.0)


def score(context, continuation):
    prev = context[-1] if context else -1
    total = 0.0
    for t in continuation:
        total += logprob(prev, t)
        prev = t
    return total


def handle(req):
    op = req.get("op")
    if op == "ping":
        return {"ok": True, "v": 1, "window": WINDOW}
    if op == "tokenize":
        word = req["word"]
        if not word:
            raise ValueError("empty word")
        return {"v": 1, "ids": [piece_id(word[i:i + 3]) for i in range(0, len(word), 3)]}
    if op == "detokenize":
        return {"v": 1, "text": "".join(names[i] for i in req["ids"])}
    if op == "score":
        ctx = req["context"][-WINDOW:]
        return {"v": 1, "logprobs": [score(ctx, c) for c in req["continuations"]]}
    raise ValueError(f"unknown op {op!r}")


for line in sys.stdin:
    try:
        resp = handle(json.loads(line))
    except Exception as e:  # noqa: BLE001
        resp = {"v": 1, "error": str(e)}
    sys.stdout.write(json.dumps(resp) + "\n")
    sys.stdout.flush()
