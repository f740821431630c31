"""Strategy files.

A strategy file is a JSON object::

    {
      "format": "isocr-strategy",
      "version": 1,
      "model": "free" | "classical" | "quantum",
      "n": <shared pairs>,
      "t": <message bits or qubits; 0 for free>,
      "labels": [<Alice's output labels, bit strings>],
      ...model-specific fields...
    }

free
    ``"alice"`` and ``"bob"`` map each label to a POVM element.
classical
    ``"messages"`` lists the message bit strings (``2^t`` of them).
    ``"alice"`` maps message -> label -> element ``P_{a,pi}``; ``"bob"`` maps
    message -> label -> element ``Q^pi_a``.
quantum
    ``"subchannels"`` maps label -> ``{"in_dim", "out_dim", "kraus": [...]}``;
    ``"bob"`` maps label -> element on ``2^t (x) 2^n`` (message register
    first).

POVM elements are stored as their lower triangle: row ``i`` holds ``i + 1``
``[re, im]`` pairs.  Kraus operators are stored in full, row by row.
Missing labels in a POVM mean the zero element.
"""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Any

from .errors import DimensionError, InvalidStrategyError
from .protocols import ClassicalStrategy, Povm, QuantumStrategy
from .quantum import QuantumChannel
from .serialize import (
    hermitian_from_json,
    hermitian_to_json,
    matrix_from_json,
    matrix_to_json,
)

FORMAT_TAG = "isocr-strategy"
VERSION = 1
_BITS = re.compile(r"^[01]*$")


def _povm_to_json(p: Povm) -> dict[str, Any]:
    return {str(lab): hermitian_to_json(e) for lab, e in p.elements.items()}


def _povm_from_json(d: dict, where: str) -> Povm:
    if not isinstance(d, dict) or not d:
        raise InvalidStrategyError(f"schema: {where} must be a non-empty object")
    try:
        els = {lab: hermitian_from_json(rows) for lab, rows in d.items()}
    except (DimensionError, TypeError, ValueError) as exc:
        raise InvalidStrategyError(f"schema: {where}: {exc}") from None
    for lab in els:
        _check_bits(lab, where)
    return Povm(els)


def _check_bits(label: str, where: str):
    if not isinstance(label, str) or not _BITS.match(label):
        raise InvalidStrategyError(f"labels: {where} label {label!r} is not a bit string")


def strategy_to_dict(strategy, n: int) -> dict[str, Any]:
    doc: dict[str, Any] = {"format": FORMAT_TAG, "version": VERSION, "n": n}
    if isinstance(strategy, tuple):
        alice, bob = strategy
        doc.update(model="free", t=0, labels=[str(x) for x in alice.labels],
                   alice=_povm_to_json(alice), bob=_povm_to_json(bob))
    elif isinstance(strategy, ClassicalStrategy):
        messages = strategy.messages
        alice: dict[str, dict] = {pi: {} for pi in messages}
        for (a, pi), e in strategy.alice.elements.items():
            alice[pi][a] = hermitian_to_json(e)
        labels = sorted({a for (a, _) in strategy.alice.labels})
        doc.update(model="classical", t=int(round(strategy.t)), labels=labels,
                   messages=messages, alice=alice,
                   bob={pi: _povm_to_json(p) for pi, p in strategy.bob.items()})
    elif isinstance(strategy, QuantumStrategy):
        import math

        doc.update(
            model="quantum",
            t=int(round(math.log2(strategy.out_dim))),
            labels=list(strategy.subchannels),
            subchannels={
                a: {"in_dim": c.in_dim, "out_dim": c.out_dim,
                    "kraus": [matrix_to_json(k) for k in c.kraus]}
                for a, c in strategy.subchannels.items()
            },
            bob=_povm_to_json(strategy.bob),
        )
    else:
        raise TypeError(f"unsupported strategy type {type(strategy).__name__}")
    return doc


def strategy_from_dict(doc: dict[str, Any]):
    """Parse and validate; returns ``(model, n, t, strategy)``.

    Free strategies are returned as an ``(alice, bob)`` tuple of POVMs.
    """
    if not isinstance(doc, dict):
        raise InvalidStrategyError("schema: strategy file must hold a JSON object")
    if doc.get("format") != FORMAT_TAG:
        raise InvalidStrategyError(f"schema: format tag must be {FORMAT_TAG!r}")
    if doc.get("version") != VERSION:
        raise InvalidStrategyError(f"schema: unsupported version {doc.get('version')!r}")
    model = doc.get("model")
    n, t = doc.get("n"), doc.get("t")
    if not isinstance(n, int) or n < 1 or not isinstance(t, int) or t < 0:
        raise InvalidStrategyError("schema: n must be a positive integer and t a non-negative integer")
    labels = doc.get("labels")
    if not isinstance(labels, list):
        raise InvalidStrategyError("schema: labels must be a list")
    for lab in labels:
        _check_bits(lab, "output")
    try:
        if model == "free":
            if t != 0:
                raise InvalidStrategyError("schema: free-model strategies have t = 0")
            alice = _povm_from_json(doc.get("alice"), "alice")
            bob = _povm_from_json(doc.get("bob"), "bob")
            for p, who in ((alice, "alice"), (bob, "bob")):
                if p.dim != 2 ** n:
                    raise InvalidStrategyError(f"dimension: {who} acts on dim {p.dim}, expected 2^{n}")
                try:
                    p.validate()
                except InvalidStrategyError as exc:
                    raise InvalidStrategyError(f"{exc} ({who})") from None
            return model, n, t, (alice, bob)
        if model == "classical":
            messages = doc.get("messages")
            if not isinstance(messages, list) or len(messages) != 2 ** t:
                raise InvalidStrategyError(f"schema: classical strategies need 2^t = {2 ** t} messages")
            for pi in messages:
                _check_bits(pi, "message")
            raw_alice = doc.get("alice")
            if not isinstance(raw_alice, dict):
                raise InvalidStrategyError("schema: alice must map messages to POVM elements")
            els = {}
            for pi, by_label in raw_alice.items():
                if pi not in messages:
                    raise InvalidStrategyError(f"messages: alice uses undeclared message {pi!r}")
                for a, rows in by_label.items():
                    _check_bits(a, "alice")
                    els[(a, pi)] = hermitian_from_json(rows)
            raw_bob = doc.get("bob")
            if not isinstance(raw_bob, dict):
                raise InvalidStrategyError("schema: bob must map messages to POVMs")
            bob = {pi: _povm_from_json(raw_bob.get(pi), f"bob[{pi}]") for pi in messages}
            s = ClassicalStrategy(Povm(els), bob)
            if s.alice.dim != 2 ** n:
                raise InvalidStrategyError(f"dimension: alice acts on dim {s.alice.dim}, expected 2^{n}")
            return model, n, t, s.validate()
        if model == "quantum":
            raw = doc.get("subchannels")
            if not isinstance(raw, dict) or not raw:
                raise InvalidStrategyError("schema: subchannels must be a non-empty object")
            subs = {}
            for a, c in raw.items():
                _check_bits(a, "subchannel")
                ch = QuantumChannel(tuple(matrix_from_json(k) for k in c["kraus"]))
                if (ch.in_dim, ch.out_dim) != (c.get("in_dim"), c.get("out_dim")):
                    raise InvalidStrategyError(f"dimension: sub-channel {a!r} disagrees with its declared dims")
                if ch.in_dim != 2 ** n or ch.out_dim != 2 ** t:
                    raise InvalidStrategyError(
                        f"dimension: sub-channel {a!r} maps {ch.in_dim} -> {ch.out_dim}, expected 2^{n} -> 2^{t}")
                subs[a] = ch
            s = QuantumStrategy(subs, _povm_from_json(doc.get("bob"), "bob"))
            return model, n, t, s.validate()
    except (KeyError, TypeError) as exc:
        raise InvalidStrategyError(f"schema: missing or malformed field {exc}") from None
    except DimensionError as exc:
        raise InvalidStrategyError(f"dimension: {exc}") from None
    raise InvalidStrategyError(f"schema: unknown model {model!r}")


def dump_strategy(strategy, n: int) -> str:
    return json.dumps(strategy_to_dict(strategy, n), indent=1, sort_keys=True) + "\n"


def save_strategy(path, strategy, n: int) -> None:
    Path(path).write_text(dump_strategy(strategy, n), encoding="utf-8")


def load_strategy(path):
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InvalidStrategyError(f"schema: not valid JSON ({exc})") from None
    return strategy_from_dict(doc)
