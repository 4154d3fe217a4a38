import json
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def oracle_values():
    return json.loads((FIXTURES / "oracle_values.json").read_text())


def strip_wall_time(text: str) -> str:
    """Drop the trailing wall_time field from every CSV line."""
    lines = text.splitlines()
    if not lines or not lines[0].endswith(",wall_time"):
        return text
    return "\n".join(line.rsplit(",", 1)[0] for line in lines) + "\n"
