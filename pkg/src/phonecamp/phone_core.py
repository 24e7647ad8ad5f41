"""Phone number extraction, normalization, and static metadata lookups.

All functions are pure given a loaded CountryTable; the table itself is a
bundled JSON snapshot (no network lookups).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources

MIN_DIGITS = 7
MAX_DIGITS = 15

LINE_TYPES = ("toll_free", "mobile", "landline", "voip", "unknown")

# Digits joined by separators; a dot only counts as a separator when it is
# immediately followed by a digit, so sentence boundaries ("...2881. Also")
# terminate the match instead of gluing two numbers together.
_SEP = r"(?:[\s\-()]|\.(?=\d))"
_CANDIDATE_RE = re.compile(r"(?:\+|\b00)?\d(?:%s*\d)+" % _SEP)
_ALLOWED_NONDIGIT_RE = re.compile(r"[\s\-().+]")


class PhoneError(ValueError):
    """Raised for invalid phone inputs; carries a machine-readable reason."""

    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        super().__init__(f"{reason}: {detail}" if detail else reason)


@dataclass(frozen=True)
class PhoneNumber:
    canonical: str
    country_code: int | None = None
    country: str = "unknown"
    line_type: str = "unknown"
    explicit_international: bool = False

    def __post_init__(self):
        if not self.canonical.isdigit():
            raise PhoneError("non_numeric_core", self.canonical)
        if not MIN_DIGITS <= len(self.canonical) <= MAX_DIGITS:
            raise PhoneError("too_short" if len(self.canonical) < MIN_DIGITS else "too_long",
                             self.canonical)


@dataclass(frozen=True)
class PhoneMatch:
    phone: PhoneNumber
    span: tuple[int, int]
    raw: str


@dataclass(frozen=True)
class CountryEntry:
    calling_code: int
    country: str
    toll_free_prefixes: tuple[str, ...]
    min_len: int
    max_len: int


@dataclass
class CountryTable:
    entries: list[CountryEntry]
    language_map: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        codes = [e.calling_code for e in self.entries]
        if len(codes) != len(set(codes)):
            raise ValueError("duplicate calling codes in country table")
        self._by_code = {e.calling_code: e for e in self.entries}
        self._by_country = {e.country: e for e in self.entries}
        # Longest calling-code prefixes first so e.g. 971 beats 9.
        self._prefixes = sorted((str(e.calling_code) for e in self.entries),
                                key=len, reverse=True)

    def by_calling_code(self, code: int) -> CountryEntry | None:
        return self._by_code.get(code)

    def by_country(self, country: str) -> CountryEntry | None:
        return self._by_country.get(country)

    def match_calling_code(self, canonical: str, explicit: bool) -> CountryEntry | None:
        """Longest calling-code prefix whose national remainder has a plausible
        length. Without an explicit international prefix the length bounds are
        mandatory; with one, any in-range remainder is accepted."""
        for prefix in self._prefixes:
            if not canonical.startswith(prefix):
                continue
            entry = self._by_code[int(prefix)]
            national = len(canonical) - len(prefix)
            if explicit and national >= 1:
                return entry
            if entry.min_len <= national <= entry.max_len:
                return entry
        return None

    @classmethod
    def load_bundled(cls) -> "CountryTable":
        pkg = resources.files("phonecamp.data")
        raw = json.loads(pkg.joinpath("country_table.json").read_text())
        langs = json.loads(pkg.joinpath("language_countries.json").read_text())
        entries = [CountryEntry(r["calling_code"], r["country"],
                                tuple(r["toll_free_prefixes"]),
                                r["min_len"], r["max_len"]) for r in raw]
        return cls(entries, langs)


def normalize_phone(raw: str, table: CountryTable | None = None) -> PhoneNumber:
    """Collapse a phone-like string to its canonical digit form.

    Strips every separator character; a leading "+" or "00" marks an explicit
    international prefix and is removed. Raises PhoneError with reason
    too_short, too_long, or non_numeric_core. Idempotent on canonical strings.
    """
    stripped = raw.strip()
    core = _ALLOWED_NONDIGIT_RE.sub("", stripped)
    explicit = False
    if stripped.startswith("+"):
        explicit = True
    if not core.isdigit() or not core:
        raise PhoneError("non_numeric_core", raw)
    if not explicit and core.startswith("00"):
        core = core[2:]
        explicit = True
    if len(core) < MIN_DIGITS:
        raise PhoneError("too_short", raw)
    if len(core) > MAX_DIGITS:
        raise PhoneError("too_long", raw)
    phone = PhoneNumber(canonical=core, explicit_international=explicit)
    if table is not None:
        entry = table.match_calling_code(core, explicit)
        if entry is not None:
            phone = PhoneNumber(canonical=core, country_code=entry.calling_code,
                                country=entry.country,
                                line_type=_line_type_for(entry, core),
                                explicit_international=explicit)
    return phone


def _looks_like_currency(text: str, start: int, end: int) -> bool:
    before = text[:start].rstrip()
    after = text[end:].lstrip()
    return before.endswith("$") or after.startswith("$")


def extract_phone_numbers(text: str, table: CountryTable) -> list[PhoneMatch]:
    """Find phone-number candidates in text, left to right, non-overlapping.

    Every returned match carries a normalized PhoneNumber; unparseable or
    out-of-bounds digit runs and currency-like amounts are skipped.
    """
    matches: list[PhoneMatch] = []
    for m in _CANDIDATE_RE.finditer(text):
        raw = m.group()
        if _looks_like_currency(text, m.start(), m.end()):
            continue
        try:
            phone = normalize_phone(raw, table)
        except PhoneError:
            continue
        matches.append(PhoneMatch(phone=phone, span=(m.start(), m.end()), raw=raw))
    return matches


def infer_country(phone: PhoneNumber, post_language: str | None,
                  table: CountryTable) -> tuple[str, str]:
    """Return (country, provenance) with provenance one of
    calling_code / language_heuristic / unknown.

    A calling-code match always wins; the language heuristic fires only for
    languages with an unambiguous bundled country mapping.
    """
    entry = table.match_calling_code(phone.canonical, phone.explicit_international)
    if entry is not None:
        return entry.country, "calling_code"
    if post_language:
        country = table.language_map.get(post_language.lower())
        if country:
            return country, "language_heuristic"
    return "unknown", "unknown"


def _national_part(entry: CountryEntry, canonical: str) -> str:
    code = str(entry.calling_code)
    if canonical.startswith(code):
        rest = canonical[len(code):]
        if entry.min_len <= len(rest) <= entry.max_len:
            return rest
    return canonical


def _line_type_for(entry: CountryEntry, canonical: str) -> str:
    national = _national_part(entry, canonical)
    for prefix in entry.toll_free_prefixes:
        if national.startswith(prefix):
            return "toll_free"
    return "unknown"


def classify_line_type(phone: PhoneNumber, table: CountryTable) -> str:
    """Table-driven line type; currently resolves toll-free prefixes only."""
    entry = None
    if phone.country != "unknown":
        entry = table.by_country(phone.country)
    if entry is None:
        entry = table.match_calling_code(phone.canonical, phone.explicit_international)
    if entry is None:
        return "unknown"
    return _line_type_for(entry, phone.canonical)


def load_bundled_table() -> CountryTable:
    return CountryTable.load_bundled()
