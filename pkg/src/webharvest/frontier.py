"""URL normalization and the per-run breadth-first crawl frontier.

Normalization gives every discovered link one canonical spelling so the
visited set can guarantee that no resource is fetched twice within a run.
The frontier itself is a plain FIFO of (url, depth) entries, which makes
the traversal breadth-first and the depth bound exact.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from urllib.parse import urljoin, urlsplit, urlunsplit

__all__ = ["FrontierEntry", "Frontier", "normalize_url"]

# RFC 3986 unreserved characters: safe to percent-decode everywhere.
_UNRESERVED = set(
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-._~"
)

_DEFAULT_PORTS = {"http": 80, "https": 443}


_HEX = set("0123456789abcdefABCDEF")


def _decode_unreserved(component: str) -> str:
    """Percent-decode only unreserved characters; leave everything else."""
    out = []
    i = 0
    n = len(component)
    while i < n:
        ch = component[i]
        if ch == "%" and i + 3 <= n and component[i + 1] in _HEX and component[i + 2] in _HEX:
            decoded = chr(int(component[i + 1 : i + 3], 16))
            if decoded in _UNRESERVED:
                out.append(decoded)
            else:
                out.append(component[i : i + 3])
            i += 3
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _remove_dot_segments(path: str) -> str:
    """Resolve "." and ".." segments the way reference resolution does."""
    output: list[str] = []
    for segment in path.split("/"):
        if segment == ".":
            continue
        if segment == "..":
            if output and output[-1] != "":
                output.pop()
            continue
        output.append(segment)
    # A trailing "." or ".." still denotes a directory.
    if path.endswith(("/.", "/..")) and (not output or output[-1] != ""):
        output.append("")
    if path.startswith("/") and (not output or output[0] != ""):
        output.insert(0, "")
    return "/".join(output)


def normalize_url(base: str, href: str) -> str | None:
    """Resolve ``href`` against ``base`` and return its canonical form.

    Canonicalization: relative references and dot segments are resolved,
    scheme and host are lowercased, default ports (80/443) are dropped,
    the fragment is stripped, unreserved percent-escapes in the path are
    decoded, and the query string is preserved byte-for-byte (parameter
    order matters to the criterion matchers downstream). The result is a
    fixed point of re-normalization.

    Returns None ("ignore this link") for non-http(s) schemes, empty
    hrefs, and anything unparsable.
    """
    # Browsers discard tab/newline anywhere in a URL; stray spaces survive
    # copy-pasted markup often enough to be worth escaping instead.
    href = href.replace("\t", "").replace("\n", "").replace("\r", "").strip()
    if not href:
        return None
    href = href.replace(" ", "%20")
    try:
        joined = urljoin(base, href)
        parts = urlsplit(joined)
        host = parts.hostname
        port = parts.port
    except ValueError:
        return None
    scheme = parts.scheme.lower()
    if scheme not in ("http", "https") or not host:
        return None

    netloc = f"[{host.lower()}]" if ":" in host else host.lower()
    if "@" in parts.netloc:
        userinfo = parts.netloc.rsplit("@", 1)[0]
        netloc = f"{userinfo}@{netloc}"
    if port is not None and port != _DEFAULT_PORTS[scheme]:
        netloc = f"{netloc}:{port}"

    path = _remove_dot_segments(_decode_unreserved(parts.path)) or "/"
    return urlunsplit((scheme, netloc, path, parts.query, ""))


@dataclass(frozen=True)
class FrontierEntry:
    """A normalized URL queued for fetching, tagged with its hop depth."""

    url: str
    depth: int


class Frontier:
    """Depth-bucketed FIFO with a per-run visited set.

    A URL is accepted once per run; the first-seen depth wins. Entries
    pop in FIFO order within a depth, shallowest non-empty depth first.
    Pagination links re-enqueue at the depth of the page they were found
    on, so a single global FIFO could pop a deeper title entry before a
    pagination sibling; the buckets keep the traversal level-by-level and
    the popped depth sequence non-decreasing.

    Single logical owner per run; not internally synchronized.
    """

    def __init__(self) -> None:
        self._seen: set[str] = set()
        self._buckets: dict[int, deque[FrontierEntry]] = {}
        self._size = 0

    def enqueue(self, entry: FrontierEntry) -> bool:
        """Accept ``entry`` unless its URL was already seen this run."""
        if entry.url in self._seen:
            return False
        self._seen.add(entry.url)
        self._buckets.setdefault(entry.depth, deque()).append(entry)
        self._size += 1
        return True

    def next(self) -> FrontierEntry | None:
        """Pop the oldest entry of the shallowest waiting depth, or None
        when exhausted."""
        if not self._size:
            return None
        depth = min(d for d, bucket in self._buckets.items() if bucket)
        entry = self._buckets[depth].popleft()
        if not self._buckets[depth]:
            del self._buckets[depth]
        self._size -= 1
        return entry

    def mark_visited(self, url: str) -> bool:
        """Record ``url`` as seen without queueing it.

        Used when a redirect lands somewhere new: the landing URL must
        join the visited set so later links to it are duplicates. Returns
        False if it was already seen.
        """
        if url in self._seen:
            return False
        self._seen.add(url)
        return True

    def seen(self, url: str) -> bool:
        return url in self._seen

    def __len__(self) -> int:
        return self._size
