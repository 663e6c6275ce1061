import json

import pytest

from flowgames.config import FlowgamesSettings
from flowgames.services.documents import DocumentStore
from flowgames.services.verification_service import VerificationService


@pytest.fixture
def settings():
    return FlowgamesSettings(seed=0)


@pytest.fixture
def store():
    return DocumentStore(indent=2)


@pytest.fixture
def verifier(settings, store):
    return VerificationService(settings, store)


@pytest.fixture
def write_json(tmp_path):
    def _write(name, payload):
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return path

    return _write
