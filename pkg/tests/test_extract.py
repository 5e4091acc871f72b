"""Box location, tag stripping, anchor extraction, record assembly."""

from __future__ import annotations

import json
import os
import random
import re

import pytest

from webharvest.extract import (
    BoxNotFound,
    HtmlDocument,
    extract_anchors,
    extract_record,
    fnv1a64,
    locate_box,
    strip_tags,
)
from webharvest.targets import FocusPoint, LinkKind, LinkRule

import htmlgen
import oracles
from conftest import FIXTURES, make_target


def doc(raw: str, base: str = "http://site.test/dir/page.html") -> HtmlDocument:
    return HtmlDocument(raw=raw, base_url=base)


class TestLocateBox:
    def test_single_table(self):
        raw = "<p>x</p><table><tr><td>cell</td></tr></table><p>y</p>"
        box = locate_box(doc(raw), FocusPoint("table", 1))
        assert box.inner == "<table><tr><td>cell</td></tr></table>"
        assert raw[box.start_offset : box.end_offset] == box.inner

    def test_nested_tables_count_in_document_order(self):
        raw = '<table id="A"><tr><td><table id="B"><tr><td>b</td></tr></table></td></tr></table>'
        box = locate_box(doc(raw), FocusPoint("table", 2))
        assert box.inner == '<table id="B"><tr><td>b</td></tr></table>'

    def test_not_found_reports_count(self):
        raw = "<table></table><table></table>"
        with pytest.raises(BoxNotFound) as info:
            locate_box(doc(raw), FocusPoint("table", 5))
        assert info.value.found_count == 2

    def test_case_insensitive_tag_names(self):
        raw = "<TABLE><tr><td>x</td></tr></TABLE>"
        box = locate_box(doc(raw), FocusPoint("table", 1))
        assert box.inner == raw

    def test_void_occurrence_has_empty_subtree(self):
        raw = "a<img src=x.jpg>b"
        box = locate_box(doc(raw), FocusPoint("img", 1))
        assert box.inner == "<img src=x.jpg>"
        assert strip_tags(box) == ""

    def test_self_closing_counts_as_occurrence(self):
        raw = "<div/><div>real</div>"
        assert locate_box(doc(raw), FocusPoint("div", 1)).inner == "<div/>"
        assert locate_box(doc(raw), FocusPoint("div", 2)).inner == "<div>real</div>"

    def test_unclosed_recovers_to_parent_end(self):
        raw = "<div><table><tr><td>cell</div>tail"
        box = locate_box(doc(raw), FocusPoint("table", 1))
        assert box.unclosed is True
        assert box.inner == "<table><tr><td>cell"

    def test_unclosed_without_parent_recovers_to_eof(self):
        raw = "<table><tr><td>forever"
        box = locate_box(doc(raw), FocusPoint("table", 1))
        assert box.unclosed is True
        assert box.inner == raw

    def test_tags_inside_comments_and_scripts_not_counted(self):
        raw = "<!-- <table> --><script>t = '<table>'</script><table>real</table>"
        box = locate_box(doc(raw), FocusPoint("table", 1))
        assert box.inner == "<table>real</table>"

    def test_offsets_nest_with_clean_text(self):
        raw = "<div><table><tr><td>a&amp;b</td></tr></table></div>"
        box = locate_box(doc(raw), FocusPoint("table", 1))
        assert strip_tags(doc(raw).raw[box.start_offset : box.end_offset]) == strip_tags(box)


class TestStripTags:
    def test_cells_and_entities(self):
        assert strip_tags("<tr><td>Title:</td><td>Qu&amp;A</td></tr>") == "Title: Qu&A"

    def test_script_content_dropped(self):
        assert strip_tags("<script>var x=1;</script>hello") == "hello"

    def test_style_and_comments_dropped(self):
        assert strip_tags("a<style>b{}</style><!-- c -->d") == "ad"

    def test_nbsp_collapses_to_space(self):
        assert strip_tags("10&nbsp;&nbsp;km") == "10 km"

    def test_numeric_entities(self):
        assert strip_tags("&#72;&#105;&#x21;") == "Hi!"

    def test_block_boundaries_prevent_fusion(self):
        assert strip_tags("<p>one</p><p>two</p>") == "one two"
        assert strip_tags("<li>a</li><li>b</li>") == "a b"

    def test_inline_tags_do_not_split_words(self):
        assert strip_tags("Qu<b>o</b>te") == "Quote"

    def test_br_is_a_boundary(self):
        assert strip_tags("line1<br>line2") == "line1 line2"

    def test_whitespace_collapsed_and_trimmed(self):
        assert strip_tags("  <div>  a \n\t b  </div>  ") == "a b"

    def test_no_angle_brackets_survive(self):
        assert strip_tags("5 &lt; 7 &gt; 3") == "5 7 3"
        assert strip_tags("a < b") == "a b"

    def test_accepts_document_and_fragment(self):
        document = doc("<p>via document</p>")
        assert strip_tags(document) == "via document"
        box = locate_box(doc("<table><td>via box</td></table>"), FocusPoint("table", 1))
        assert strip_tags(box) == "via box"

    def test_output_free_of_markup_characters(self):
        rng = random.Random(99)
        for _ in range(50):
            text = strip_tags(htmlgen.generate_document(rng))
            assert "<" not in text and ">" not in text
            assert not re.search(r"&(amp|lt|gt|quot|apos|nbsp|#[0-9]+|#x[0-9a-fA-F]+);", text)


class TestExtractAnchors:
    def test_no_anchors(self):
        assert extract_anchors(doc("<p>nothing here</p>")) == []

    def test_relative_resolution(self):
        anchors = extract_anchors(doc('<a href="x.html">Go</a>', base="http://ex.org/d/"))
        assert len(anchors) == 1
        assert anchors[0].href == "http://ex.org/d/x.html"
        assert anchors[0].text == "Go"

    def test_rejected_links_omitted(self):
        raw = (
            '<a href="a.html">1</a>'
            '<a href="javascript:void(0)">2</a>'
            '<a href="mailto:x@y.z">3</a>'
            '<a href="b.html">4</a>'
            "<a>no href</a>"
        )
        anchors = extract_anchors(doc(raw))
        assert [a.text for a in anchors] == ["1", "4"]

    def test_document_order(self):
        raw = '<div><a href="1.html">a</a></div><a href="2.html">b</a>'
        anchors = extract_anchors(doc(raw))
        assert [a.href.rsplit("/", 1)[1] for a in anchors] == ["1.html", "2.html"]

    def test_anchor_text_is_stripped_and_collapsed(self):
        raw = '<a href="x.html"> <b>Bold</b>\n  move </a>'
        (anchor,) = extract_anchors(doc(raw))
        assert anchor.text == "Bold move"

    def test_unclosed_anchor_ends_at_next_anchor(self):
        raw = '<a href="1.html">first <a href="2.html">second</a>'
        anchors = extract_anchors(doc(raw))
        assert [a.text for a in anchors] == ["first", "second"]

    def test_entity_in_href_decoded(self):
        raw = '<a href="list?a=1&amp;b=2">x</a>'
        (anchor,) = extract_anchors(doc(raw, base="http://ex.org/"))
        assert anchor.href == "http://ex.org/list?a=1&b=2"

    def test_host_flag_against_target_host(self):
        raw = '<a href="http://site.test/a">in</a><a href="http://other.test/b">out</a>'
        anchors = extract_anchors(doc(raw), target_host="site.test")
        assert [a.host_matches_target for a in anchors] == [True, False]

    def test_host_flag_defaults_to_document_host(self):
        raw = '<a href="local.html">in</a>'
        (anchor,) = extract_anchors(doc(raw, base="http://me.test/x/"))
        assert anchor.host_matches_target is True


ARTICLE = """<!DOCTYPE html>
<html><body>
<table class="nav"><tr><td><a href="/home.html">Home</a></td></tr></table>
<table class="record">
<tr><td>Title:</td><td>A Study</td></tr>
<tr><td>Files:</td><td>
  <a href="files/a.pdf">Download PDF</a>
  <img src="img/fig.jpg" alt="">
  <a href="extras/a.zip">Supplement</a>
  <a href="mailto:x@y.z">Mail</a>
</td></tr>
</table>
</body></html>
"""


class TestExtractRecord:
    def test_full_record(self):
        target = make_target()
        record = extract_record(
            doc(ARTICLE, base="http://site.test/article.html"), target, now=1234
        )
        assert record.target_id == target.id
        assert record.source_url == "http://site.test/article.html"
        assert record.clean_text == "Title: A Study Files: Download PDF Supplement Mail"
        assert record.asset_links == (
            ("http://site.test/files/a.pdf", LinkKind.FULL_TEXT),
            ("http://site.test/img/fig.jpg", LinkKind.IMAGE),
        )
        assert record.harvested_at == 1234
        assert record.content_hash == fnv1a64(record.clean_text.encode("utf-8"))

    def test_assets_only_from_inside_box(self):
        # The nav table's anchor is outside the focus box.
        target = make_target(
            content_link_rules=(LinkRule(kind=LinkKind.OTHER, keywords=("home",)),)
        )
        record = extract_record(
            doc(ARTICLE, base="http://site.test/article.html"), target, now=0
        )
        assert record.asset_links == ()

    def test_no_rules_no_assets(self):
        target = make_target(content_link_rules=())
        record = extract_record(doc(ARTICLE, base="http://site.test/a.html"), target, now=0)
        assert record.asset_links == ()

    def test_first_matching_rule_wins(self):
        target = make_target(
            content_link_rules=(
                LinkRule(kind=LinkKind.OTHER, keywords=("files/",)),
                LinkRule(kind=LinkKind.FULL_TEXT, keywords=("pdf",)),
            )
        )
        record = extract_record(doc(ARTICLE, base="http://site.test/a.html"), target, now=0)
        assert record.asset_links == (
            ("http://site.test/files/a.pdf", LinkKind.OTHER),
        )

    def test_missing_box_raises_not_found(self):
        target = make_target(focus_point=FocusPoint(tag_name="table", ordinal=9))
        with pytest.raises(BoxNotFound) as info:
            extract_record(doc(ARTICLE, base="http://site.test/a.html"), target, now=0)
        assert info.value.found_count == 2

    def test_deterministic(self):
        target = make_target()
        document = doc(ARTICLE, base="http://site.test/a.html")
        first = extract_record(document, target, now=7)
        second = extract_record(document, target, now=7)
        assert first == second


class TestFnv1a64:
    def test_reference_vectors(self):
        # Published FNV-1a test vectors.
        assert fnv1a64(b"") == 0xCBF29CE484222325
        assert fnv1a64(b"a") == 0xAF63DC4C8601EC8C
        assert fnv1a64(b"foobar") == 0x85944171F73967E8

    def test_hash_tracks_text_equality(self):
        assert fnv1a64("same".encode()) == fnv1a64("same".encode())
        assert fnv1a64("one".encode()) != fnv1a64("two".encode())


class TestMalformedCorpus:
    with open(os.path.join(FIXTURES, "malformed", "corpus.json"), encoding="utf-8") as fh:
        CASES = json.load(fh)

    @pytest.mark.parametrize("case", CASES, ids=[c["name"] for c in CASES])
    def test_strip_tags_matches_committed_text(self, case):
        assert strip_tags(case["html"]) == case["expected_text"]

    @pytest.mark.parametrize(
        "case",
        [c for c in CASES if "focus" in c],
        ids=[c["name"] for c in CASES if "focus" in c],
    )
    def test_box_matches_committed_text(self, case):
        tag, ordinal = case["focus"]
        box = locate_box(doc(case["html"]), FocusPoint(tag, ordinal))
        assert strip_tags(box) == case["expected_box_text"]
        assert box.unclosed is case.get("unclosed", False)


class TestDomOracleEquivalence:
    def test_generated_documents_agree_with_dom_oracle(self):
        rng = random.Random(20260810)
        checked_boxes = 0
        for i in range(200):
            raw = htmlgen.generate_document(rng)
            assert strip_tags(raw) == oracles.document_text(raw), f"doc {i}"
            root = oracles.build_dom(raw)
            for tag in ("div", "table", "td", "p"):
                count = oracles.count_elements(root, tag)
                ordinal = rng.randint(1, count + 1)
                expected = oracles.box_text(raw, tag, ordinal)
                if expected is None:
                    with pytest.raises(BoxNotFound) as info:
                        locate_box(doc(raw), FocusPoint(tag, ordinal))
                    assert info.value.found_count == count
                else:
                    box = locate_box(doc(raw), FocusPoint(tag, ordinal))
                    assert strip_tags(box) == expected, f"doc {i} <{tag}>[{ordinal}]"
                    checked_boxes += 1
        assert checked_boxes > 150

    def test_fixture_site_documents_agree_with_dom_oracle(self):
        site_dir = os.path.join(FIXTURES, "site")
        for name in sorted(os.listdir(site_dir)):
            if not name.endswith(".html"):
                continue
            with open(os.path.join(site_dir, name), encoding="utf-8") as fh:
                raw = fh.read()
            assert strip_tags(raw) == oracles.document_text(raw), name
            root = oracles.build_dom(raw)
            tables = oracles.count_elements(root, "table")
            for ordinal in range(1, tables + 1):
                box = locate_box(doc(raw), FocusPoint("table", ordinal))
                assert strip_tags(box) == oracles.box_text(raw, "table", ordinal), name
