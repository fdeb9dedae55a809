"""Degree-profile ingestion from fixture files, with optional remote
fetch-and-cache.  Offline is the default and tests rely on it: nothing
touches the network unless a base URL is passed explicitly."""

from __future__ import annotations

import json
import os
import urllib.request
from pathlib import Path

from .density import DegreeProfile
from .utils import write_text_atomic

FIXTURE_ENV = "CYCLORED_FIXTURES"


class FixtureMissing(Exception):
    """No fixture file for the label and remote fetching is disabled."""


class SchemaMismatch(Exception):
    """Fixture or remote payload does not look like a degree profile."""


def fixture_dir() -> Path:
    override = os.environ.get(FIXTURE_ENV)
    if override:
        return Path(override)
    return Path(__file__).resolve().parent / "fixtures"


def _parse_profile_payload(label: str, text: str) -> DegreeProfile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaMismatch(f"fixture for {label!r} is not JSON: {exc}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("degrees"), dict):
        raise SchemaMismatch(f"fixture for {label!r} lacks a degrees table")
    if "label" in doc and doc["label"] != label:
        raise SchemaMismatch(
            f"fixture says {doc['label']!r} but {label!r} was requested"
        )
    try:
        return DegreeProfile.from_json_dict(doc)
    except (ValueError, TypeError) as exc:
        raise SchemaMismatch(f"fixture for {label!r} is invalid: {exc}") from None


def ingest_degrees(
    label: str,
    source: str | os.PathLike | None = None,
    remote_base: str | None = None,
) -> DegreeProfile:
    """Load the degree profile for a curve label.

    source overrides the fixture directory.  When remote_base is given
    (any URL urllib accepts, file:// included) and no fixture exists,
    the payload is fetched from {remote_base}/{label}.json and cached
    into the fixture directory for future offline runs.
    """
    base = Path(source) if source is not None else fixture_dir()
    path = base / f"{label}.json"
    if path.exists():
        return _parse_profile_payload(label, path.read_text())
    if remote_base is None:
        raise FixtureMissing(f"no fixture {path} and remote fetching is off")
    url = f"{remote_base.rstrip('/')}/{label}.json"
    try:
        with urllib.request.urlopen(url) as resp:
            text = resp.read().decode("utf-8")
    except OSError as exc:
        raise FixtureMissing(f"remote fetch of {url} failed: {exc}") from None
    profile = _parse_profile_payload(label, text)
    base.mkdir(parents=True, exist_ok=True)
    write_text_atomic(str(path), text)
    return profile
