"""Orthography profiles: normalization rows, segmentation properties."""

from __future__ import annotations

import unicodedata

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jambu.errors import ProfileError
from jambu.ortho import (
    conversion_report,
    load_profile,
    normalize,
    parse_profile,
    segment,
)

from .conftest import identity_profile, profile_text

NFC = lambda s: unicodedata.normalize("NFC", s)

# source-specific normalization profiles, authored to cover the published
# example rows for Old Indo-Aryan, European Romani and Shumashti
OIA_RULES = [
    ("*", "*"),
    ("a", "a"), ("ā", "ā"), ("i", "i"), ("ī", "ī"),
    ("u", "u"), ("ū", "ū"), ("e", "e"), ("o", "o"),
    ("r̥", "r̥"), ("ṛ", "r̥"),
    ("k", "k"), ("kh", "kʰ"), ("g", "g"), ("gh", "gʰ"),
    ("c", "c"), ("ch", "cʰ"), ("j", "j"), ("jh", "jʰ"),
    ("ṭ", "ṭ"), ("ṭh", "ṭʰ"),
    ("ḍ", "ḍ"), ("ḍh", "ḍʰ"),
    ("t", "t"), ("th", "tʰ"), ("d", "d"), ("dh", "dʰ"),
    ("p", "p"), ("ph", "pʰ"), ("b", "b"), ("bh", "bʰ"),
    ("m", "m"), ("n", "n"), ("y", "y"), ("r", "r"), ("l", "l"), ("v", "v"),
    ("ś", "ś"), ("ṣ", "ṣ"), ("s", "s"), ("h", "h"),
]

ROMANI_RULES = [
    ("a", "a"), ("e", "e"), ("i", "i"), ("o", "o"), ("u", "u"),
    ("č", "c"), ("čh", "cʰ"),
    ("k", "k"), ("kh", "kʰ"), ("p", "p"), ("ph", "pʰ"),
    ("t", "t"), ("th", "tʰ"),
    ("h", "h"), ("r", "r"), ("l", "l"), ("m", "m"), ("n", "n"), ("s", "s"),
    ("š", "ś"),
]

SHUMASHTI_RULES = [
    ("a", "a"), ("ä", "æ"), ("ä́", "ǽ"),
    ("i", "i"), ("u", "u"),
    ("š", "ś"), ("s", "s"), ("n", "n"), ("m", "m"),
]


class TestNormalizationRows:
    def test_old_indo_aryan_row(self):
        profile = parse_profile(profile_text(OIA_RULES), "oia")
        out, ok = normalize(profile, "*anugr̥bhāyati")
        assert ok
        assert out == "*anugr̥bʰāyati"

    def test_european_romani_row(self):
        profile = parse_profile(profile_text(ROMANI_RULES), "romani")
        out, ok = normalize(profile, "učhar")
        assert ok
        assert out == "ucʰar"

    def test_shumashti_row(self):
        profile = parse_profile(profile_text(SHUMASHTI_RULES), "shumashti")
        out, ok = normalize(profile, "ä́šin")
        assert ok
        assert out == "ǽśin"

    def test_cdial_vocalic_r_is_rewritten(self):
        profile = parse_profile(profile_text(OIA_RULES), "oia")
        out, ok = normalize(profile, "apavṛtta-")
        assert not ok                      # the hyphen has no rule
        assert out == "apavr̥tta-"    # but it passes through unchanged


class TestProfileLoading:
    def test_two_row_file(self, tmp_path):
        path = tmp_path / "p.tsv"
        path.write_text("Grapheme\tReplacement\na\ta\nbh\tbʰ\n", encoding="utf-8")
        profile = load_profile(path)
        assert len(profile.rules) == 2

    def test_duplicate_grapheme_rejected(self, tmp_path):
        path = tmp_path / "p.tsv"
        path.write_text("Grapheme\tReplacement\na\ta\na\tb\n", encoding="utf-8")
        with pytest.raises(ProfileError) as exc:
            load_profile(path)
        assert exc.value.kind == "duplicate-grapheme"

    def test_duplicate_after_nfc_rejected(self):
        # composed and decomposed spellings of the same grapheme collide
        with pytest.raises(ProfileError):
            parse_profile(profile_text([("á", "a"), ("á", "b")]))

    def test_header_only_profile_segments_nothing(self):
        profile = parse_profile("Grapheme\tReplacement\n")
        result = segment(profile, "ab")
        assert result.tokens == ()
        assert result.failures == ((0, "a"), (1, "b"))

    def test_missing_header_rejected(self):
        with pytest.raises(ProfileError) as exc:
            parse_profile("a\tb\n")
        assert exc.value.kind == "malformed-profile"

    def test_comments_and_blank_lines_ignored(self):
        profile = parse_profile("# comment\nGrapheme\tReplacement\n\na\tx\n")
        assert normalize(profile, "aa") == ("xx", True)

    def test_anchor_only_grapheme_rejected(self):
        with pytest.raises(ProfileError):
            parse_profile(profile_text([("^", "x")]))


class TestSegmentation:
    def test_longest_match_beats_shorter(self):
        profile = parse_profile(profile_text([("a", "a"), ("ab", "X")]))
        result = segment(profile, "ab")
        assert result.tokens == (("ab", "X"),)
        assert result.failures == ()

    def test_identity_single_characters(self):
        profile = identity_profile(["u", "č", "h", "a", "r"])
        result = segment(profile, "učhar")
        assert [g for g, _ in result.tokens] == ["u", "č", "h", "a", "r"]
        assert result.failures == ()

    def test_unmatched_character_is_failure(self):
        profile = identity_profile(["a"])
        result = segment(profile, "q")
        assert result.tokens == ()
        assert result.failures == ((0, "q"),)

    def test_anchors(self):
        profile = parse_profile(
            profile_text([("^a", "A"), ("a$", "Z"), ("a", "a"), ("b", "b")])
        )
        assert normalize(profile, "aba") == ("AbZ", True)
        assert normalize(profile, "a") == ("A", True)   # start anchor listed first wins

    def test_rule_order_breaks_length_ties(self):
        profile = parse_profile(profile_text([("a$", "END"), ("a", "MID")]))
        assert normalize(profile, "aa") == ("MIDEND", True)
        profile2 = parse_profile(profile_text([("a", "MID"), ("a$", "END")]))
        assert normalize(profile2, "aa") == ("MIDMID", True)

    def test_failures_pass_through_normalize(self):
        profile = parse_profile(profile_text([("a", "x")]))
        out, ok = normalize(profile, "aqa")
        assert (out, ok) == ("xqx", False)


class TestConversionReport:
    def test_all_convertible(self):
        profile = identity_profile(["a", "b"])
        report = conversion_report(profile, ["ab", "ba", "aaa"])
        assert (report.converted, report.failed) == (3, 0)
        assert report.rate == 1.0

    def test_one_failure_histogram(self):
        profile = identity_profile(["a", "b"])
        report = conversion_report(profile, ["ab", "aq", "ba"])
        assert (report.converted, report.failed) == (2, 1)
        assert report.histogram == (("q", 1),)

    def test_counts_sum_to_input_size(self):
        profile = identity_profile(["a"])
        forms = ["a", "q", "aq", "", "aa"]
        report = conversion_report(profile, forms)
        assert report.total == len(forms)


# strategies for the randomized suites: a small alphabet with some
# multi-codepoint graphemes in the mix
_ALPHABET = ["a", "b", "c", "á", "h", "ʰ", "ṭ"]
_graphemes = st.text(alphabet=_ALPHABET, min_size=1, max_size=3)
_inputs = st.text(alphabet=_ALPHABET + ["q", "z"], min_size=0, max_size=12)


@st.composite
def _profiles(draw):
    pairs = draw(
        st.lists(
            st.tuples(_graphemes, st.text(alphabet=_ALPHABET, max_size=2)),
            min_size=1,
            max_size=8,
        )
    )
    seen = set()
    unique = []
    for g, r in pairs:
        g = NFC(g)
        if g and g not in seen:
            seen.add(g)
            unique.append((g, r))
    if not unique:
        unique = [("a", "a")]
    return parse_profile(profile_text(unique))


class TestSegmentationProperties:
    @settings(max_examples=1000, deadline=None)
    @given(profile=_profiles(), text=_inputs)
    def test_reconstruction(self, profile, text):
        result = segment(profile, text)
        rebuilt = []
        fail_at = dict(result.failures)
        i = 0
        ti = 0
        expected = NFC(text)
        while i < len(expected):
            if i in fail_at:
                rebuilt.append(fail_at[i])
                i += 1
            else:
                grapheme, _ = result.tokens[ti]
                rebuilt.append(grapheme)
                i += len(grapheme)
                ti += 1
        assert "".join(rebuilt) == expected
        assert ti == len(result.tokens)

    @settings(max_examples=1000, deadline=None)
    @given(profile=_profiles(), text=_inputs)
    def test_longest_match(self, profile, text):
        expected = NFC(text)
        result = segment(profile, text)
        # recover each token's position, then check no rule core one
        # codepoint longer also matches there
        fail_offsets = {off for off, _ in result.failures}
        i = 0
        ti = 0
        while i < len(expected):
            if i in fail_offsets:
                i += 1
                continue
            grapheme, _ = result.tokens[ti]
            longer = len(grapheme) + 1
            for rule in profile.rules:
                if len(rule.core) != longer:
                    continue
                if rule.at_start and i != 0:
                    continue
                if rule.at_end and i + longer != len(expected):
                    continue
                assert not expected.startswith(rule.core, i), (
                    f"token {grapheme!r} at {i} extendable to {rule.core!r}"
                )
            i += len(grapheme)
            ti += 1

    @settings(max_examples=300, deadline=None)
    @given(profile=_profiles(), text=_inputs)
    def test_determinism(self, profile, text):
        assert segment(profile, text) == segment(profile, text)

    @settings(max_examples=300, deadline=None)
    @given(text=_inputs)
    def test_identity_profile_idempotent(self, text):
        profile = identity_profile(_ALPHABET + ["q", "z"])
        once, ok1 = normalize(profile, text)
        twice, ok2 = normalize(profile, once)
        assert ok1 and ok2
        assert once == twice
