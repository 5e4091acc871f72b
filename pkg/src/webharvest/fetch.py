"""Polite HTTP retrieval.

The harvester never hammers a site: requests to one host are spaced by a
configurable delay, robots exclusion is honored by default, bodies are
size-capped, and retries are reserved for transient conditions (transport
failures and 5xx). Asset links are recorded by the extractor but never
downloaded here; only pages on the traversal path are fetched.

The single-exchange transport and the clock are injected, so every timing
and logging property is testable with fakes.
"""

from __future__ import annotations

import logging
import re
import threading
from collections import deque
from dataclasses import dataclass, field
from typing import Protocol
from urllib.parse import urlsplit

from .clock import Clock, SystemClock
from .frontier import normalize_url

__all__ = [
    "FetchPolicy",
    "FetchedPage",
    "FetchError",
    "RobotsDenied",
    "FetchTimeout",
    "TooManyRedirects",
    "TransportError",
    "NonHtml",
    "RawResponse",
    "Transport",
    "RequestsTransport",
    "Fetcher",
    "parse_robots",
    "robots_allows",
]

logger = logging.getLogger(__name__)

_REDIRECT_STATUSES = {301, 302, 303, 307, 308}
_HTML_CONTENT_TYPES = {"text/html", "application/xhtml+xml"}
_MAX_REDIRECTS = 5


@dataclass(frozen=True)
class FetchPolicy:
    """Knobs for polite retrieval; defaults suit small institutional sites."""

    per_host_delay: float = 1.0
    timeout: float = 30.0
    max_retries: int = 2
    max_body_bytes: int = 8 * 1024 * 1024
    user_agent: str = "webharvest/0.1"
    respect_robots: bool = True


@dataclass(frozen=True)
class FetchedPage:
    requested_url: str
    final_url: str
    status: int
    body_text: str
    fetched_at: float


class FetchError(Exception):
    """Base for everything fetch() can raise."""


class RobotsDenied(FetchError):
    def __init__(self, url: str) -> None:
        super().__init__(f"disallowed by robots.txt: {url}")
        self.url = url


class FetchTimeout(FetchError):
    pass


class TooManyRedirects(FetchError):
    pass


class TransportError(FetchError):
    pass


class NonHtml(FetchError):
    def __init__(self, content_type: str) -> None:
        super().__init__(f"not an HTML response: {content_type}")
        self.content_type = content_type


@dataclass
class RawResponse:
    """One HTTP exchange as the transport saw it. Header keys lowercased."""

    status: int
    headers: dict[str, str]
    body: bytes


class Transport(Protocol):
    def request(
        self, url: str, headers: dict[str, str], timeout: float, max_bytes: int
    ) -> RawResponse:
        """Perform one GET without following redirects.

        Must raise TimeoutError on timeout and OSError on transport
        failure; must not read more than ``max_bytes`` body bytes.
        """
        ...


class RequestsTransport:
    """Default transport on top of requests, one session per instance."""

    def __init__(self) -> None:
        import requests

        self._session = requests.Session()

    def request(
        self, url: str, headers: dict[str, str], timeout: float, max_bytes: int
    ) -> RawResponse:
        import requests

        try:
            resp = self._session.get(
                url,
                headers=headers,
                timeout=timeout,
                stream=True,
                allow_redirects=False,
            )
        except requests.Timeout as exc:
            raise TimeoutError(str(exc)) from exc
        except requests.RequestException as exc:
            raise OSError(str(exc)) from exc
        try:
            chunks: list[bytes] = []
            read = 0
            for chunk in resp.iter_content(chunk_size=65536):
                if not chunk:
                    continue
                room = max_bytes - read
                if room <= 0:
                    break
                chunks.append(chunk[:room])
                read += len(chunk[:room])
        except requests.Timeout as exc:
            raise TimeoutError(str(exc)) from exc
        except requests.RequestException as exc:
            raise OSError(str(exc)) from exc
        finally:
            resp.close()
        headers_out = {k.lower(): v for k, v in resp.headers.items()}
        return RawResponse(
            status=resp.status_code, headers=headers_out, body=b"".join(chunks)
        )


# --- robots exclusion --------------------------------------------------------


@dataclass
class _RobotsGroup:
    agents: list[str] = field(default_factory=list)
    rules: list[tuple[bool, str]] = field(default_factory=list)  # (allow, prefix)


def parse_robots(text: str) -> list[_RobotsGroup]:
    """Parse robots.txt into user-agent groups of Allow/Disallow prefixes."""
    groups: list[_RobotsGroup] = []
    current: _RobotsGroup | None = None
    last_was_agent = False
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line or ":" not in line:
            continue
        key, value = line.split(":", 1)
        key = key.strip().lower()
        value = value.strip()
        if key == "user-agent":
            if current is None or not last_was_agent:
                current = _RobotsGroup()
                groups.append(current)
            current.agents.append(value.lower())
            last_was_agent = True
        else:
            last_was_agent = False
            if key in ("allow", "disallow") and current is not None:
                current.rules.append((key == "allow", value))
    return groups


def robots_allows(groups: list[_RobotsGroup], user_agent: str, path: str) -> bool:
    """Apply longest-match Allow/Disallow for the best user-agent group.

    The group whose agent token is the longest case-insensitive substring
    match of ``user_agent`` wins; ``*`` is the fallback. Among matching
    rules the longest path prefix decides, Allow winning length ties. No
    matching rule means allowed.
    """
    ua = user_agent.lower()
    best_group: _RobotsGroup | None = None
    best_len = -1
    for group in groups:
        for agent in group.agents:
            if agent == "*":
                if best_len < 0:
                    best_group = group
                    best_len = 0
            elif agent in ua and len(agent) > best_len:
                best_group = group
                best_len = len(agent)
    if best_group is None:
        return True

    verdict = True
    match_len = -1
    for allow, prefix in best_group.rules:
        if not prefix:
            # An empty Disallow means "allow everything"; as a rule it
            # matches nothing.
            continue
        if path.startswith(prefix):
            if len(prefix) > match_len or (len(prefix) == match_len and allow):
                match_len = len(prefix)
                verdict = allow
    return verdict


# --- the fetcher --------------------------------------------------------------


class Fetcher:
    """Politeness-gated page retrieval with a per-run robots cache.

    Thread-safe: fetches to different hosts proceed in parallel, while a
    per-host lock serializes same-host requests and enforces the delay
    between one request's completion and the next one's start. The
    request log records (url, start, end) in clock time for every request
    actually issued, robots.txt included.
    """

    def __init__(
        self,
        policy: FetchPolicy | None = None,
        clock: Clock | None = None,
        transport: Transport | None = None,
    ) -> None:
        self.policy = policy or FetchPolicy()
        self.clock = clock or SystemClock()
        self.transport = transport or RequestsTransport()
        # (url, start, completion) for every request issued; bounded so a
        # long-lived shared fetcher cannot grow without limit.
        self.request_log: deque[tuple[str, float, float]] = deque(maxlen=50_000)
        self._robots_cache: dict[str, list[_RobotsGroup]] = {}
        self._last_completion: dict[str, float] = {}
        self._host_locks: dict[str, threading.Lock] = {}
        self._state_lock = threading.Lock()

    # -- politeness gate

    def _host_lock(self, host: str) -> threading.Lock:
        with self._state_lock:
            return self._host_locks.setdefault(host, threading.Lock())

    def _gated_request(self, url: str) -> RawResponse:
        """One exchange, spaced at least per_host_delay after the previous
        completion on the same host and retried per policy."""
        host = urlsplit(url).netloc
        headers = {
            "User-Agent": self.policy.user_agent,
            "Accept": "text/html,application/xhtml+xml",
        }
        with self._host_lock(host):
            attempts = 1 + self.policy.max_retries
            response: RawResponse | None = None
            error: Exception | None = None
            for attempt in range(attempts):
                with self._state_lock:
                    last = self._last_completion.get(host)
                if last is not None:
                    wait = last + self.policy.per_host_delay - self.clock.now()
                    if wait > 0:
                        self.clock.sleep(wait)
                started = self.clock.now()
                try:
                    response = self.transport.request(
                        url, headers, self.policy.timeout, self.policy.max_body_bytes
                    )
                    error = None
                except TimeoutError as exc:
                    self._log_request(url, started)
                    raise FetchTimeout(f"{url}: {exc}") from exc
                except OSError as exc:
                    error = exc
                    response = None
                self._log_request(url, started)
                if response is not None and not 500 <= response.status < 600:
                    break
            if response is None:
                raise TransportError(f"{url}: {error}") from error
            return response

    def _log_request(self, url: str, started: float) -> None:
        done = self.clock.now()
        host = urlsplit(url).netloc
        with self._state_lock:
            self.request_log.append((url, started, done))
            self._last_completion[host] = done

    # -- robots

    def check_robots(self, url: str) -> bool:
        """True when policy.user_agent may fetch ``url``.

        robots.txt is fetched once per host per run and cached; any
        failure to obtain it (including 4xx/5xx) defaults to allowed.
        """
        if not self.policy.respect_robots:
            return True
        parts = urlsplit(url)
        netloc = parts.netloc
        with self._state_lock:
            groups = self._robots_cache.get(netloc)
        if groups is None:
            robots_url = f"{parts.scheme}://{netloc}/robots.txt"
            try:
                response = self._gated_request(robots_url)
                if response.status == 200:
                    groups = parse_robots(
                        response.body.decode("utf-8", errors="replace")
                    )
                else:
                    groups = []
            except FetchError:
                groups = []
            with self._state_lock:
                self._robots_cache[netloc] = groups
        path = parts.path or "/"
        if parts.query:
            path = f"{path}?{parts.query}"
        return robots_allows(groups, self.policy.user_agent, path)

    # -- fetching

    def fetch(self, url: str) -> FetchedPage:
        """Retrieve one page, following up to five redirects.

        Each hop is robots-checked, politeness-gated, and logged. The
        body is truncated at max_body_bytes and decoded by the charset
        rules (Content-Type header, then meta tag in the first KiB, then
        UTF-8 with replacement).
        """
        current = url
        response: RawResponse | None = None
        for _hop in range(_MAX_REDIRECTS + 1):
            if not self.check_robots(current):
                raise RobotsDenied(current)
            response = self._gated_request(current)
            if response.status in _REDIRECT_STATUSES:
                location = response.headers.get("location")
                if not location:
                    break
                target = normalize_url(current, location)
                if target is None:
                    raise TransportError(
                        f"{current}: unresolvable redirect to {location!r}"
                    )
                current = target
                response = None
                continue
            break
        if response is None:
            raise TooManyRedirects(f"{url}: more than {_MAX_REDIRECTS} redirects")

        content_type = response.headers.get("content-type", "")
        bare_type = content_type.split(";", 1)[0].strip().lower()
        if bare_type and bare_type not in _HTML_CONTENT_TYPES:
            raise NonHtml(content_type)

        body_text = _decode_body(response.body, content_type)
        return FetchedPage(
            requested_url=url,
            final_url=current,
            status=response.status,
            body_text=body_text,
            fetched_at=self.clock.now(),
        )


_META_CHARSET_RE = re.compile(
    rb"""<meta[^>]+charset\s*=\s*["']?\s*([a-zA-Z0-9_.:-]+)""", re.IGNORECASE
)


def _decode_body(body: bytes, content_type: str) -> str:
    """Charset priority: Content-Type param, meta tag in the first 1024
    bytes, UTF-8 with replacement."""
    charset = None
    m = re.search(r"charset\s*=\s*([^\s;]+)", content_type, re.IGNORECASE)
    if m:
        charset = m.group(1).strip("\"'")
    if charset is None:
        meta = _META_CHARSET_RE.search(body[:1024])
        if meta:
            charset = meta.group(1).decode("ascii", errors="replace")
    if charset is not None:
        try:
            return body.decode(charset, errors="replace")
        except LookupError:
            pass
    return body.decode("utf-8", errors="replace")
