"""Per-criterion result lines, printed in the terminal summary by conftest."""

LINES = []


def record(number: int, ok: bool, detail: str) -> None:
    LINES.append(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
