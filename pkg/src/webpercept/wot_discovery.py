"""Runtime discovery of Thing Descriptions.

Three ways in: ask a TD Directory for everything it knows, fetch one TD
by URL, or mine a Page Affordance Model for links that smell like TDs.
Nothing here mutates its inputs, and every network call is bounded by a
timeout and a body-size cap.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timezone
from urllib.parse import urljoin, urlsplit

import requests

from .errors import BodyTooLarge, NetworkError, ProtocolError, UnsupportedScheme
from .transducer.pipeline import PageAffordanceModel

DEFAULT_TIMEOUT = 5.0
DEFAULT_MAX_BODY = 1 << 20  # 1 MiB

TD_MEDIA_TYPE = "application/td+json"
_ACCEPT = f"{TD_MEDIA_TYPE}, application/json"

# Link-recognition rules: suffixes and path segments that mark TD URLs.
TD_PATH_SUFFIXES = (".td.json", ".jsonld")
TD_PATH_SEGMENT = "/things/"
TD_REL = "describedby"


@dataclass(frozen=True)
class DirectoryClient:
    base_url: str
    timeout: float = DEFAULT_TIMEOUT
    max_body: int = DEFAULT_MAX_BODY

    def __post_init__(self) -> None:
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.max_body <= 0:
            raise ValueError("max_body must be positive")


@dataclass(frozen=True)
class TdCandidate:
    url: str
    source: str  # "directory" | "pam_link" | "manual"
    label: str | None = None


@dataclass(frozen=True)
class FetchedTd:
    """A TD body plus the provenance the catalog wants to remember."""

    text: str
    url: str
    fetched_at: str


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _bounded_get(url: str, timeout: float, max_body: int, accept: str) -> tuple[int, str, bytes]:
    scheme = urlsplit(url).scheme.lower()
    if scheme not in ("http", "https"):
        raise UnsupportedScheme(f"cannot fetch {url!r}: only http(s) is supported")
    try:
        response = requests.get(
            url, headers={"Accept": accept}, timeout=timeout, stream=True
        )
    except requests.RequestException as exc:
        raise NetworkError(f"GET {url} failed: {exc}") from exc
    try:
        declared = response.headers.get("Content-Length")
        if declared is not None and declared.isdigit() and int(declared) > max_body:
            raise BodyTooLarge(f"{url}: declared {declared} bytes exceeds limit {max_body}")
        chunks: list[bytes] = []
        received = 0
        try:
            for chunk in response.iter_content(chunk_size=65536):
                received += len(chunk)
                if received > max_body:
                    raise BodyTooLarge(f"{url}: body exceeds limit of {max_body} bytes")
                chunks.append(chunk)
        except requests.RequestException as exc:
            raise NetworkError(f"GET {url} interrupted: {exc}") from exc
        media_type = response.headers.get("Content-Type", "")
        return response.status_code, media_type, b"".join(chunks)
    finally:
        response.close()


def list_things(client: DirectoryClient) -> list[str]:
    """All TDs a directory knows, each as its own JSON text.

    The wire contract is the WoT Discovery subset this package speaks:
    GET {base_url}/things returning a JSON array of TD documents.
    Elements are re-serialized individually for parse_td.
    """
    url = urljoin(client.base_url.rstrip("/") + "/", "things")
    status, _, body = _bounded_get(url, client.timeout, client.max_body, _ACCEPT)
    if status != 200:
        raise ProtocolError(f"directory {url} answered {status}", status=status)
    try:
        listing = json.loads(body)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"directory {url} returned unparseable JSON: {exc}", status=status)
    if not isinstance(listing, list):
        raise ProtocolError(f"directory {url} must return a JSON array", status=status)
    return [json.dumps(item, ensure_ascii=False) for item in listing]


def fetch_td(
    url: str,
    timeout: float = DEFAULT_TIMEOUT,
    max_body: int = DEFAULT_MAX_BODY,
) -> FetchedTd:
    """GET one TD, keeping where and when it came from."""
    status, _, body = _bounded_get(url, timeout, max_body, _ACCEPT)
    if status != 200:
        raise ProtocolError(f"GET {url} answered {status}", status=status)
    return FetchedTd(text=body.decode("utf-8", errors="replace"), url=url, fetched_at=_utc_now())


def fetch_page(
    url: str,
    timeout: float = DEFAULT_TIMEOUT,
    max_body: int = 8 << 20,
) -> bytes:
    """GET an HTML page with the same bounds the TD fetcher enforces."""
    status, _, body = _bounded_get(
        url, timeout, max_body, "text/html, application/xhtml+xml, */*"
    )
    if status != 200:
        raise ProtocolError(f"GET {url} answered {status}", status=status)
    return body


def _looks_like_td(url: str, media_type_hint: str | None, rel: str | None) -> bool:
    if media_type_hint:
        bare = media_type_hint.split(";", 1)[0].strip().lower()
        if bare == TD_MEDIA_TYPE:
            return True
    if rel and TD_REL in rel.lower().split():
        return True
    path = urlsplit(url).path.lower()
    if path.endswith(TD_PATH_SUFFIXES):
        return True
    if TD_PATH_SEGMENT in path:
        return True
    return False


def find_td_links(pam: PageAffordanceModel, base_url: str | None = None) -> list[TdCandidate]:
    """Link affordances that look like Thing Descriptions.

    Candidates come back in document order, deduplicated by resolved
    URL. Relative targets resolve against ``base_url`` or the PAM's
    source_url; a relative link with neither is skipped, since a
    candidate must be absolute to be fetchable.
    """
    base = base_url or pam.source_url
    seen: set[str] = set()
    out: list[TdCandidate] = []
    for aff in pam.affordances:
        if aff.kind != "link" or not aff.target:
            continue
        url = urljoin(base, aff.target) if base else aff.target
        if urlsplit(url).scheme not in ("http", "https"):
            continue
        if not _looks_like_td(url, aff.media_type_hint, aff.rel):
            continue
        if url in seen:
            continue
        seen.add(url)
        out.append(TdCandidate(url=url, source="pam_link", label=aff.label or None))
    return out
