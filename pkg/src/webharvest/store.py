"""Record persistence and the searchable topical index.

Only extracted text and link metadata are stored, never raw HTML. The
store is a single append-safe JSON Lines file replayed into memory at
startup, plus an in-memory inverted index over the clean text. That
comfortably covers the tens of thousands of documents a desk-scale
deployment sees, with no database dependency.

Search is conjunctive: every query token must appear in a document, and
the score is the summed term frequency of the query tokens. Ties break on
source URL so results are fully deterministic.
"""

from __future__ import annotations

import json
import os
from collections import Counter, defaultdict
from dataclasses import dataclass, replace
from enum import Enum

from .extract import ExtractedRecord
from .targets import LinkKind

__all__ = [
    "IndexedDocument",
    "SearchHit",
    "UpsertResult",
    "StorageError",
    "IndexStore",
    "tokenize_text",
]


class UpsertResult(Enum):
    INSERTED = "inserted"
    UPDATED = "updated"
    UNCHANGED = "unchanged"


class StorageError(Exception):
    """The store file could not be read or written."""


@dataclass(frozen=True)
class IndexedDocument:
    record: ExtractedRecord
    content_type: str
    first_seen: int
    last_seen: int
    version: int
    tombstone: bool = False


@dataclass(frozen=True)
class SearchHit:
    source_url: str
    target_id: str
    content_type: str
    score: int
    snippet: str


_SNIPPET_LIMIT = 200


def tokenize_text(text: str) -> list[str]:
    """Lowercase tokens: maximal runs of Unicode letters and digits."""
    return "".join(
        ch if ch.isalnum() else " " for ch in text.lower()
    ).split()


class IndexStore:
    """Single-writer document store with an inverted index.

    ``path`` is the append-safe backing file; None keeps everything in
    memory (one-shot runs that only need a report). Concurrent readers
    are safe because upserts replace immutable snapshots.
    """

    def __init__(self, path: str | None = None) -> None:
        self.path = path
        self._docs: dict[tuple[str, str], IndexedDocument] = {}
        self._index: dict[str, dict[tuple[str, str], int]] = defaultdict(dict)
        if path is not None and os.path.exists(path):
            self._load(path)

    # -- persistence

    def _load(self, path: str) -> None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                for line_no, line in enumerate(fh, start=1):
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        obj = json.loads(line)
                    except json.JSONDecodeError as exc:
                        raise StorageError(
                            f"{path}:{line_no}: corrupt store line: {exc.msg}"
                        ) from None
                    doc = _doc_from_dict(obj)
                    key = (doc.record.target_id, doc.record.source_url)
                    self._replace_doc(key, doc)
        except OSError as exc:
            raise StorageError(f"cannot read store {path}: {exc}") from exc

    def _append(self, doc: IndexedDocument) -> None:
        if self.path is None:
            return
        try:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(_doc_to_json(doc))
                fh.write("\n")
        except OSError as exc:
            raise StorageError(f"cannot write store {self.path}: {exc}") from exc

    def _replace_doc(
        self, key: tuple[str, str], doc: IndexedDocument
    ) -> None:
        old = self._docs.get(key)
        if old is not None:
            for token in set(tokenize_text(old.record.clean_text)):
                postings = self._index.get(token)
                if postings is not None:
                    postings.pop(key, None)
                    if not postings:
                        del self._index[token]
        self._docs[key] = doc
        if not doc.tombstone:
            for token, count in Counter(
                tokenize_text(doc.record.clean_text)
            ).items():
                self._index[token][key] = count

    # -- writes

    def upsert(
        self, record: ExtractedRecord, now: int, content_type: str = ""
    ) -> UpsertResult:
        """Insert or refresh one record.

        A new (target_id, source_url) key inserts at version 1. An
        existing key with a different content hash re-indexes at
        version+1; an identical hash only advances last_seen.
        """
        key = (record.target_id, record.source_url)
        old = self._docs.get(key)
        if old is None or old.tombstone:
            doc = IndexedDocument(
                record=record,
                content_type=content_type,
                first_seen=now,
                last_seen=now,
                version=1 if old is None else old.version + 1,
            )
            result = UpsertResult.INSERTED
        elif old.record.content_hash == record.content_hash:
            doc = replace(old, last_seen=now)
            result = UpsertResult.UNCHANGED
        else:
            doc = IndexedDocument(
                record=record,
                content_type=content_type or old.content_type,
                first_seen=old.first_seen,
                last_seen=now,
                version=old.version + 1,
            )
            result = UpsertResult.UPDATED
        self._replace_doc(key, doc)
        self._append(doc)
        return result

    def delete_target(self, target_id: str) -> int:
        """Tombstone every document of a removed target; returns count."""
        count = 0
        for key, doc in list(self._docs.items()):
            if key[0] == target_id and not doc.tombstone:
                dead = replace(doc, tombstone=True)
                self._replace_doc(key, dead)
                self._append(dead)
                count += 1
        return count

    # -- reads

    def document_count(self) -> int:
        return sum(1 for d in self._docs.values() if not d.tombstone)

    def documents(self) -> list[IndexedDocument]:
        live = [d for d in self._docs.values() if not d.tombstone]
        live.sort(key=lambda d: (d.record.target_id, d.record.source_url))
        return live

    def get(self, target_id: str, source_url: str) -> IndexedDocument | None:
        doc = self._docs.get((target_id, source_url))
        if doc is None or doc.tombstone:
            return None
        return doc

    def stats(self) -> dict:
        by_target: Counter[str] = Counter()
        by_type: Counter[str] = Counter()
        for doc in self._docs.values():
            if doc.tombstone:
                continue
            by_target[doc.record.target_id] += 1
            by_type[doc.content_type] += 1
        return {
            "documents": self.document_count(),
            "by_target": dict(sorted(by_target.items())),
            "by_content_type": dict(sorted(by_type.items())),
        }

    def search(self, query: str, limit: int = 20) -> list[SearchHit]:
        """Conjunctive term search over clean text.

        Score is the sum of the query tokens' term frequencies in the
        document; hits are ordered by (score desc, source_url asc). The
        snippet is the text window starting at the first query-token
        match, capped at 200 characters.
        """
        tokens = list(dict.fromkeys(tokenize_text(query)))
        if not tokens or limit < 1:
            return []
        candidate_keys: set[tuple[str, str]] | None = None
        for token in tokens:
            postings = self._index.get(token)
            if not postings:
                return []
            keys = set(postings)
            candidate_keys = keys if candidate_keys is None else candidate_keys & keys
            if not candidate_keys:
                return []
        assert candidate_keys is not None

        hits = []
        for key in candidate_keys:
            doc = self._docs[key]
            score = sum(self._index[token][key] for token in tokens)
            hits.append(
                SearchHit(
                    source_url=doc.record.source_url,
                    target_id=doc.record.target_id,
                    content_type=doc.content_type,
                    score=score,
                    snippet=_snippet(doc.record.clean_text, tokens),
                )
            )
        hits.sort(key=lambda h: (-h.score, h.source_url))
        return hits[:limit]

    # -- export / import

    def export(self, destination: str) -> int:
        """Write the live documents as deterministic JSON Lines.

        Ordered by (target_id, source_url); one object per line with the
        fixed key order. Returns the number of documents written.
        """
        docs = self.documents()
        try:
            with open(destination, "w", encoding="utf-8") as fh:
                for doc in docs:
                    fh.write(_doc_to_export_json(doc))
                    fh.write("\n")
        except OSError as exc:
            raise StorageError(f"cannot write export {destination}: {exc}") from exc
        return len(docs)

    def import_export(self, source: str) -> int:
        """Load an export file into this store; returns documents read."""
        count = 0
        try:
            with open(source, "r", encoding="utf-8") as fh:
                for line_no, line in enumerate(fh, start=1):
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        obj = json.loads(line)
                    except json.JSONDecodeError as exc:
                        raise StorageError(
                            f"{source}:{line_no}: corrupt export line: {exc.msg}"
                        ) from None
                    doc = _doc_from_export_dict(obj, f"{source}:{line_no}")
                    key = (doc.record.target_id, doc.record.source_url)
                    self._replace_doc(key, doc)
                    self._append(doc)
                    count += 1
        except OSError as exc:
            raise StorageError(f"cannot read export {source}: {exc}") from exc
        return count


def _snippet(text: str, tokens: list[str]) -> str:
    lower = text.lower()
    first = len(text)
    for token in tokens:
        pos = lower.find(token)
        if pos != -1 and pos < first:
            first = pos
    if first >= len(text):
        first = 0
    return text[first : first + _SNIPPET_LIMIT]


def _assets_to_list(record: ExtractedRecord) -> list[dict]:
    return [{"url": url, "kind": kind.value} for url, kind in record.asset_links]


def _doc_to_export_json(doc: IndexedDocument) -> str:
    obj = {
        "target_id": doc.record.target_id,
        "source_url": doc.record.source_url,
        "content_type": doc.content_type,
        "clean_text": doc.record.clean_text,
        "asset_links": _assets_to_list(doc.record),
        "first_seen": doc.first_seen,
        "last_seen": doc.last_seen,
        "version": doc.version,
        "content_hash": f"{doc.record.content_hash:016x}",
    }
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def _doc_to_json(doc: IndexedDocument) -> str:
    obj = json.loads(_doc_to_export_json(doc))
    obj["harvested_at"] = doc.record.harvested_at
    if doc.tombstone:
        obj["tombstone"] = True
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def _record_from_fields(obj: dict, where: str) -> ExtractedRecord:
    try:
        assets = tuple(
            (a["url"], LinkKind(a["kind"])) for a in obj.get("asset_links", [])
        )
        return ExtractedRecord(
            target_id=obj["target_id"],
            source_url=obj["source_url"],
            clean_text=obj["clean_text"],
            asset_links=assets,
            harvested_at=int(obj.get("harvested_at", obj["last_seen"])),
            content_hash=int(obj["content_hash"], 16),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise StorageError(f"{where}: malformed document: {exc}") from None


def _doc_from_dict(obj: dict) -> IndexedDocument:
    record = _record_from_fields(obj, "store")
    return IndexedDocument(
        record=record,
        content_type=obj.get("content_type", ""),
        first_seen=int(obj["first_seen"]),
        last_seen=int(obj["last_seen"]),
        version=int(obj["version"]),
        tombstone=bool(obj.get("tombstone", False)),
    )


def _doc_from_export_dict(obj: dict, where: str) -> IndexedDocument:
    record = _record_from_fields(obj, where)
    return IndexedDocument(
        record=record,
        content_type=obj.get("content_type", ""),
        first_seen=int(obj["first_seen"]),
        last_seen=int(obj["last_seen"]),
        version=int(obj["version"]),
    )
