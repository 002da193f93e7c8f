"""Shared fixtures: the entry-454 fixture, phoneme inventory, profiles."""

from __future__ import annotations

import pytest

from jambu.cldf import write_wordlist
from jambu.entries import AbbreviationTable, entry_to_records, parse_entry
from jambu.model import CognateSet, Database, Form, Language, Source
from jambu.ortho import parse_profile

# The worked example used throughout: dictionary entry 454 with two
# ancestor-language headwords and four reflexes in three descendant lects.
ENTRY_454 = (
    "454 ápavartayati tr. 'turns away from' RV. "
    "2. apavṛtta- 'reversed' ŚāṅkhŚr. [√vṛt1]\n"
    "1. Pk. ōvattēi 'causes to turn back'; "
    "S. oṭī f. 'turning over the edge of a cloth and hemming';\n"
    "2. G. oṭvũ 'to hem', oṭī f. 'tucked up part of dhotī or sāṛī'."
)

ABBREVS = {
    "OIA.": "oia",
    "Pk.": "prakrit",
    "S.": "sindhi",
    "G.": "gujarati",
    "H.": "hindi",
    "P.": "panjabi",
    "B.": "bengali",
    "M.": "marathi",
    "N.": "nepali",
    "Or.": "oriya",
    "Si.": "sinhala",
    "L.": "lahnda",
    "K.": "kashmiri",
    "A.": "assamese",
    "Ku.": "kumauni",
    "Mth.": "maithili",
    "Aw.": "awadhi",
    "Bhoj.": "bhojpuri",
    "WPah.": "west-pahari",
    "Gy.": "romani",
    "Ka.": "kannada",
    "Ta.": "tamil",
    "Te.": "telugu",
    "Ma.": "malayalam",
}

IGNORE_SIGLA = (
    "RV.",
    "AV.",
    "TS.",
    "MBh.",
    "Pāṇ.",
    "ŚāṅkhŚr.",
    "Suśr.",
    "KātyŚr.",
)

# Phoneme inventory for tokenization fixtures: aspirates, long vowels and
# nasal vowels are single graphemes. '*' and '-' are notation (reconstruction
# mark, stem boundary); they pass the conversion audit but never reach token
# streams because tokenization strips them.
PHONEMES = (
    "*", "-",
    "a", "á", "ā", "i", "í", "ī", "u", "ú", "ū",
    "e", "ē", "o", "ō", "ai", "au",
    "ã", "ā̃", "ĩ", "ũ", "ẽ", "õ",
    "r̥", "ṛ",
    "k", "kʰ", "g", "gʰ", "c", "cʰ", "j", "jʰ",
    "ṭ", "ṭʰ", "ḍ", "ḍʰ", "t", "tʰ", "d", "dʰ",
    "p", "pʰ", "b", "bʰ",
    "kh", "gh", "ch", "jh", "ṭh", "ḍh", "th", "dh", "ph", "bh",
    "m", "n", "ṇ", "ñ", "ṅ",
    "y", "r", "l", "v", "w", "ś", "ṣ", "s", "h", "ḷ",
    "č",
)


def profile_text(pairs) -> str:
    lines = ["Grapheme\tReplacement"]
    lines += [f"{g}\t{r}" for g, r in pairs]
    return "\n".join(lines) + "\n"


def identity_profile(symbols):
    return parse_profile(profile_text((s, s) for s in symbols), name="inventory")


@pytest.fixture(scope="session")
def abbrevs() -> AbbreviationTable:
    return AbbreviationTable(languages=dict(ABBREVS), ignore=frozenset(IGNORE_SIGLA))


@pytest.fixture(scope="session")
def entry_454(abbrevs):
    return parse_entry(ENTRY_454, abbrevs)


FIG_LANGUAGES = (
    Language(id="oia", name="Old Indo-Aryan", clade=("Indo-Aryan", "Old Indo-Aryan"), latitude=30.0, longitude=78.0),
    Language(id="prakrit", name="Prakrit", clade=("Indo-Aryan", "Middle Indo-Aryan"), latitude=24.0, longitude=77.0),
    Language(id="sindhi", name="Sindhi", clade=("Indo-Aryan", "Northwestern"), latitude=25.9, longitude=68.5),
    Language(id="gujarati", name="Gujarati", clade=("Indo-Aryan", "Western"), latitude=22.7, longitude=71.1),
)


@pytest.fixture(scope="session")
def entry_454_db(entry_454) -> Database:
    """The entry-454 fixture as a loaded database."""
    cognateset, forms = entry_to_records(entry_454, "oia", source_bibkey="cdial")
    return Database(
        forms=forms,
        cognatesets=[cognateset],
        languages=FIG_LANGUAGES,
        sources=[Source(bibkey="cdial", entry_type="book", fields=(("title", "A comparative dictionary"),))],
    )


@pytest.fixture(scope="session")
def inventory_profile():
    return identity_profile(PHONEMES)


@pytest.fixture()
def inventory_profile_path(tmp_path):
    path = tmp_path / "inventory.tsv"
    path.write_text(profile_text((s, s) for s in PHONEMES), encoding="utf-8")
    return path


@pytest.fixture()
def entry_454_dir(tmp_path, entry_454_db):
    """The entry-454 database written out as a dataset directory."""
    target = tmp_path / "fig-dataset"
    write_wordlist(entry_454_db, target)
    return target
