from pathlib import Path

import pytest

from dtkg import build_dtkg, convert, load_queries, parse_turtle

ROOT = Path(__file__).resolve().parent.parent
SAMPLES = ROOT / "samples"


@pytest.fixture(scope="session")
def samples() -> Path:
    return SAMPLES


@pytest.fixture(scope="session")
def obama_text() -> str:
    return (SAMPLES / "obama.ttl").read_text()


@pytest.fixture(scope="session")
def family_text() -> str:
    return (SAMPLES / "family.dq").read_text()


@pytest.fixture(scope="session")
def obama(obama_text):
    return parse_turtle(obama_text)


@pytest.fixture(scope="session")
def base(obama):
    return build_dtkg(convert(obama))


@pytest.fixture(scope="session")
def family(base, family_text):
    return load_queries(family_text, base)
