"""Reading and writing set families.

JSON: ``{"n": 3, "sets": [[], [1], [1, 2]]}`` with 1-based elements.
Text: one set per line, comma-separated elements, ``-`` for the empty set,
``#`` starts a comment, and an optional ``n=<int>`` line fixes the ground
set (otherwise the largest element is used).
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import FamilyParseError
from .families import SetFamily


def _from_json(text: str) -> SetFamily:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise FamilyParseError(f"malformed JSON: {e}") from None
    if not isinstance(data, dict) or "sets" not in data:
        raise FamilyParseError('JSON family needs an object with a "sets" array')
    sets = data["sets"]
    if not isinstance(sets, list) or not all(isinstance(s, list) for s in sets):
        raise FamilyParseError('"sets" must be a list of lists')
    if not all(isinstance(e, int) and not isinstance(e, bool) for s in sets for e in s):
        raise FamilyParseError("set elements must be integers")
    n = data.get("n")
    if n is None:
        n = max((e for s in sets for e in s), default=1)
    if not isinstance(n, int) or isinstance(n, bool):
        raise FamilyParseError('"n" must be an integer')
    return _build(n, sets)


def _from_text(text: str) -> SetFamily:
    n = None
    sets = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("n="):
            try:
                n = int(line[2:])
            except ValueError:
                raise FamilyParseError(f"line {lineno}: bad ground-set size {line!r}") from None
            continue
        if line == "-":
            sets.append([])
            continue
        try:
            sets.append([int(tok) for tok in line.split(",")])
        except ValueError:
            raise FamilyParseError(f"line {lineno}: cannot parse {raw!r}") from None
    if not sets:
        raise FamilyParseError("no sets found")
    if n is None:
        n = max((e for s in sets for e in s), default=1)
    return _build(n, sets)


def _build(n: int, sets: list[list[int]]) -> SetFamily:
    try:
        return SetFamily.from_lists(n, sets)
    except ValueError as e:
        raise FamilyParseError(str(e)) from None


def parse_family(text: str) -> SetFamily:
    """Parse either format; JSON is recognized by a leading brace."""
    if text.lstrip().startswith("{"):
        return _from_json(text)
    return _from_text(text)


def load_family(path: str | Path) -> SetFamily:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise FamilyParseError(f"cannot read {path}: {e}") from None
    return parse_family(text)


def family_to_json(f: SetFamily) -> str:
    return json.dumps({"n": f.n, "sets": f.to_lists()})


def family_to_text(f: SetFamily) -> str:
    lines = [f"n={f.n}"]
    lines += [",".join(map(str, s)) if s else "-" for s in f.to_lists()]
    return "\n".join(lines) + "\n"
