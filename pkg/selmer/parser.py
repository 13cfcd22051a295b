"""
Parsers for the small argument languages of the selmer CLI.

Spaces are written "type:dimension", signatures "r1,r2".
"""

import re
from typing import List, Tuple

from .heuristics import Signature
from .symspace import SpaceType

# Aliases accepted before the colon of a space specification
SPACE_ALIASES = {
    "alt": SpaceType.ALTERNATING,
    "alternating": SpaceType.ALTERNATING,
    "odd": SpaceType.NONALT_ODD,
    "nonalt-odd": SpaceType.NONALT_ODD,
    "even": SpaceType.NONALT_EVEN,
    "nonalt-even": SpaceType.NONALT_EVEN,
}

_SPACE_PATTERN = re.compile(r'^([a-z-]+)\s*:\s*(\d+)$')
_SIGNATURE_PATTERN = re.compile(r'^\(?\s*(\d+)\s*,\s*(\d+)\s*\)?$')


def parse_space(text: str) -> Tuple[SpaceType, int]:
    """
    Parse a space specification into its type and dimension.

    Supported formats:
        - "nonalt:3" -> (NONALT_ODD, 3), parity picks odd or even
        - "alt:4" -> (ALTERNATING, 4)
        - "odd:5" -> (NONALT_ODD, 5)
        - "even:2" -> (NONALT_EVEN, 2)

    Args:
        text: Input string.

    Returns:
        Tuple of (space type, dimension).

    Raises:
        ValueError: If the format is not recognized or no space of that type
            exists in that dimension.
    """
    match = _SPACE_PATTERN.match(text.strip().lower())
    if not match:
        raise ValueError(
            f"Unrecognized space: '{text}'. "
            "Supported formats: 'nonalt:3', 'alt:4', 'odd:5', 'even:2'"
        )
    name, n = match.group(1), int(match.group(2))

    if name == "nonalt":
        space_type = SpaceType.NONALT_ODD if n % 2 else SpaceType.NONALT_EVEN
    elif name in SPACE_ALIASES:
        space_type = SPACE_ALIASES[name]
    else:
        raise ValueError(f"Unknown space type '{name}' in '{text}'")

    if not space_type.admits(n):
        raise ValueError(f"No {space_type.value} space of dimension {n}: '{text}'")
    return space_type, n


def parse_signature(text: str) -> Signature:
    """
    Parse a signature "r1,r2" (parentheses optional).

    Examples:
        "3,0" -> Signature(3, 0)
        "(5,1)" -> Signature(5, 1)

    Raises:
        ValueError: If the format is not recognized or r1 is even.
    """
    match = _SIGNATURE_PATTERN.match(text.strip())
    if not match:
        raise ValueError(f"Unrecognized signature: '{text}'. Expected 'r1,r2', e.g. '3,0'")
    # InadmissibleError is a ValueError, so bad values surface the same way
    return Signature(int(match.group(1)), int(match.group(2)))


def parse_signatures(text: str) -> List[Signature]:
    """Parse a ';'-separated list such as "3,0;5,1"."""
    parts = [p for p in text.split(";") if p.strip()]
    if not parts:
        raise ValueError(f"No signatures in '{text}'")
    return [parse_signature(p) for p in parts]
