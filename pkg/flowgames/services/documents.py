import json
import logging
from pathlib import Path
from typing import Any

from pydantic import BaseModel

from flowgames.errors.handlers import load_json_file, parse_payload
from flowgames.models.games import CircuitFile, GameDocument, ProfileFile

logger = logging.getLogger(__name__)


class DocumentStore:
    """Reads the JSON inputs of every command and writes their outputs."""

    def __init__(self, indent: int = 2):
        self.indent = indent

    def load_game(self, path: str | Path) -> tuple[str, Any]:
        """
        Load any game file.

        Returns:
            tuple: The ``type`` of the file and the domain instance.
        """
        document = parse_payload(GameDocument, load_json_file(path), str(path))
        logger.info("Loaded %s game from %s", document.kind, path)
        return document.kind, document.to_domain()

    def load_profile(self, path: str | Path, kind: str) -> dict[str, dict]:
        payload = parse_payload(ProfileFile, load_json_file(path), str(path))
        return payload.to_domain(index_keys=kind == "bgp")

    def load_circuit(self, path: str | Path):
        payload = parse_payload(CircuitFile, load_json_file(path), str(path))
        return payload.to_domain()

    def dumps(self, model: BaseModel | dict) -> str:
        if isinstance(model, BaseModel):
            data = model.model_dump(mode="json", exclude_none=True)
        else:
            data = model
        return json.dumps(data, indent=self.indent, ensure_ascii=False) + "\n"

    def write(self, path: str | Path, model: BaseModel | dict) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.dumps(model), encoding="utf-8")
        logger.info("Wrote %s", path)
        return path
