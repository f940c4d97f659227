"""Boundary conditions for the two-spin representations.

A boundary condition pins the black spins, the white spins, both, or
neither to a constant sign on the boundary faces.  The string form uses
``r`` for black (red) and ``w`` for white: ``"free"``, ``"r+"``, ``"r-"``,
``"w+"``, ``"w-"``, and combinations such as ``"r+w+"``.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class BoundaryCondition:
    black: int | None = None
    white: int | None = None

    def __post_init__(self):
        for s in (self.black, self.white):
            if s not in (None, 1, -1):
                raise ValueError(f"spin boundary value must be None or +-1, got {s}")

    @staticmethod
    def parse(text: str) -> "BoundaryCondition":
        text = text.strip()
        if text in ("free", ""):
            return BoundaryCondition()
        black = white = None
        i = 0
        while i < len(text):
            color, sign = text[i], text[i + 1]
            value = {"+": 1, "-": -1}.get(sign)
            if value is None or color not in "rw":
                raise ValueError(f"cannot parse boundary condition {text!r}")
            if color == "r":
                black = value
            else:
                white = value
            i += 2
        return BoundaryCondition(black=black, white=white)

    def __str__(self) -> str:
        if self.black is None and self.white is None:
            return "free"
        parts = []
        if self.black is not None:
            parts.append("r" + ("+" if self.black > 0 else "-"))
        if self.white is not None:
            parts.append("w" + ("+" if self.white > 0 else "-"))
        return "".join(parts)


FREE = BoundaryCondition()
BLACK_PLUS = BoundaryCondition(black=1)
BLACK_MINUS = BoundaryCondition(black=-1)
WHITE_PLUS = BoundaryCondition(white=1)
PLUS_PLUS = BoundaryCondition(black=1, white=1)
