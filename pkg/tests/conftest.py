"""Shared fixtures: the committed fixture site, a local HTTP server for
it, an in-memory transport for generated sites, and target builders."""

from __future__ import annotations

import json
import os
import threading
from datetime import timedelta
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from webharvest.fetch import RawResponse
from webharvest.targets import (
    FocusPoint,
    HarvestTarget,
    LinkKind,
    LinkRule,
    MatchScope,
    PagingCriterion,
)

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")
SITE_DIR = os.path.join(FIXTURES, "site")


def load_manifest() -> dict:
    with open(os.path.join(SITE_DIR, "manifest.json"), encoding="utf-8") as fh:
        return json.load(fh)


def load_site_routes() -> dict[str, bytes]:
    """Map served URL path (with query) to file bytes."""
    manifest = load_manifest()
    routes = {}
    for route, filename in manifest["routes"].items():
        with open(os.path.join(SITE_DIR, filename), "rb") as fh:
            routes[route] = fh.read()
    return routes


class FixtureSiteServer:
    """Local HTTP server serving the committed site routes."""

    def __init__(self, routes: dict[str, bytes]) -> None:
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def do_GET(self) -> None:  # noqa: N802 - http.server API
                body = outer.routes.get(self.path)
                if body is None:
                    self.send_response(404)
                    self.send_header("Content-Type", "text/html; charset=utf-8")
                    self.end_headers()
                    self.wfile.write(b"<html><body>missing</body></html>")
                    return
                content_type = (
                    "text/plain; charset=utf-8"
                    if self.path.endswith("robots.txt")
                    else "text/html; charset=utf-8"
                )
                self.send_response(200)
                self.send_header("Content-Type", content_type)
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def log_message(self, fmt, *args):  # silence test output
                pass

        self.routes = routes
        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(
            target=self._server.serve_forever, daemon=True
        )

    def start(self) -> "FixtureSiteServer":
        self._thread.start()
        return self

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()

    @property
    def base_url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}"


@pytest.fixture(scope="session")
def site_server():
    server = FixtureSiteServer(load_site_routes()).start()
    yield server
    server.stop()


@pytest.fixture(scope="session")
def manifest() -> dict:
    return load_manifest()


class DictTransport:
    """In-memory transport: URL to (status, headers, body) with a request
    log. Unknown URLs get 404s; robots.txt defaults to 404 (allowed)."""

    def __init__(self, pages: dict[str, RawResponse | bytes | str]) -> None:
        self.pages: dict[str, RawResponse] = {}
        for url, value in pages.items():
            self.pages[url] = _coerce_response(value)
        self.log: list[str] = []

    def request(self, url, headers, timeout, max_bytes):
        self.log.append(url)
        response = self.pages.get(url)
        if response is None:
            return RawResponse(
                status=404,
                headers={"content-type": "text/html; charset=utf-8"},
                body=b"<html><body>missing</body></html>",
            )
        return RawResponse(
            status=response.status,
            headers=dict(response.headers),
            body=response.body[:max_bytes],
        )


def _coerce_response(value) -> RawResponse:
    if isinstance(value, RawResponse):
        return value
    body = value.encode("utf-8") if isinstance(value, str) else value
    return RawResponse(
        status=200,
        headers={"content-type": "text/html; charset=utf-8"},
        body=body,
    )


def make_target(**overrides) -> HarvestTarget:
    """A well-formed target; fields overridable per test."""
    base = dict(
        id="t1",
        institution_id="inst-1",
        content_type="publication",
        start_url="http://site.test/section.html",
        depth=1,
        paging_criterion=PagingCriterion(
            keywords=("page=",),
            separator="&",
            param_count=1,
            scope=MatchScope.URL_ONLY,
        ),
        focus_point=FocusPoint(tag_name="table", ordinal=2),
        content_link_rules=(
            LinkRule(kind=LinkKind.FULL_TEXT, keywords=("pdf",)),
            LinkRule(kind=LinkKind.IMAGE, keywords=("jpg",)),
        ),
        reharvest_period=timedelta(hours=1),
        max_pages=500,
        enabled=True,
    )
    base.update(overrides)
    return HarvestTarget(**base)


def fixture_target(base_url: str, **overrides) -> HarvestTarget:
    """The acceptance target for the committed fixture site."""
    defaults = dict(
        start_url=f"{base_url}/section.html",
        depth=1,
        focus_point=FocusPoint(tag_name="table", ordinal=2),
    )
    defaults.update(overrides)
    return make_target(**defaults)
