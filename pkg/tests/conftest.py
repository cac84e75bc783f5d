from importlib.resources import files

import pytest

from safsec.model import Document
from safsec.modelfile import parse


def load_bundled(name: str) -> str:
    return files("safsec.data").joinpath(name).read_text(encoding="utf-8")


def parse_bundled(name: str) -> Document:
    result = parse(load_bundled(name))
    assert result.ok, [str(d) for d in result.diagnostics]
    return result.document


@pytest.fixture
def airbag_doc() -> Document:
    return parse_bundled("airbag.ssm")


@pytest.fixture
def servertheft_doc() -> Document:
    return parse_bundled("servertheft.ssm")


@pytest.fixture
def building_doc() -> Document:
    return parse_bundled("building.ssm")


@pytest.fixture
def building_revised_doc() -> Document:
    return parse_bundled("building_revised.ssm")
