import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import pytest  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"
_CRITERIA: dict[int, tuple[str, str, str]] = {}


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


def record(num: int, title: str, ok: bool, detail: str = "") -> None:
    _CRITERIA[num] = (title, "PASS" if ok else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        title, status, detail = _CRITERIA[num]
        line = f"criterion {num}: {status}  {title}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)
