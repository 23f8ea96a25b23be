"""Bibliographic record ingestion and citation resolution.

Two input formats are supported:

* ``tagged`` -- field-tagged export files: one field per line, 2-char tag
  at column 0 (UT uid, TI title, AB abstract, PY year, AU authors, SO
  source, DI doi, CR cited references), continuation lines indented by
  three spaces, records terminated by ``ER``, file terminated by ``EF``.
  AU and CR are multi-valued: one value per line.
* ``lines`` -- one record per line as a flat JSON object.

Cited references are resolved against the corpus itself through a
normalized citation key (DOI when present, otherwise
``firstauthor|year|source|volume|page``).  Matching is exact on the key;
a key shared by several records resolves to nothing.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .errors import DataError, ParseError

YEAR_MIN = 1800
YEAR_MAX = 2100

_TAGS_SINGLE = {"UT", "TI", "AB", "PY", "SO", "DI"}
_TAGS_MULTI = {"AU", "CR"}


@dataclass
class RawRecord:
    """One paper as parsed from an input file."""

    uid: str
    title: str = ""
    abstract: str = ""
    year: int | None = None
    authors: list[str] = field(default_factory=list)
    source: str = ""
    doi: str | None = None
    cited_refs: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class CitationKey:
    key: str


@dataclass
class Corpus:
    """Parsed records plus the citation links resolved among them.

    ``links`` holds (citing_uid, cited_uid) pairs, deduplicated, free of
    self-links, and sorted.  The three counters classify every cited_ref
    entry exactly once: it either produced a match (``resolved_ref_count``,
    including refs whose link collapsed as a duplicate), was a
    self-citation, or stayed unresolved.
    """

    records: list[RawRecord]
    links: list[tuple[str, str]]
    unresolved_count: int = 0
    resolved_ref_count: int = 0
    self_citation_count: int = 0

    def record_by_uid(self, uid: str) -> RawRecord:
        return self._index()[uid]

    def _index(self) -> dict[str, RawRecord]:
        if not hasattr(self, "_uid_index"):
            self._uid_index = {r.uid: r for r in self.records}
        return self._uid_index


def _decode(data: bytes) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"input is not valid UTF-8 at byte {exc.start}") from exc


def _as_bytes(source) -> bytes:
    if isinstance(source, bytes):
        return source
    if isinstance(source, str):
        return source.encode("utf-8")
    return source.read()


def parse_records(source, format: str = "tagged") -> list[RawRecord]:
    """Parse an input file into RawRecords, preserving input order.

    ``source`` may be bytes, str, or a binary file object.
    """
    data = _as_bytes(source)
    if format == "tagged":
        return _parse_tagged(data)
    if format == "lines":
        return _parse_lines(data)
    raise DataError(f"unknown record format: {format!r}")


def _check_year(value, uid, offset):
    try:
        year = int(value)
    except (TypeError, ValueError):
        raise ParseError(f"record {uid!r}: bad year {value!r} (byte {offset})")
    if not YEAR_MIN <= year <= YEAR_MAX:
        raise ParseError(f"record {uid!r}: year {year} outside [{YEAR_MIN}, {YEAR_MAX}] (byte {offset})")
    return year


def _parse_tagged(data: bytes) -> list[RawRecord]:
    records: list[RawRecord] = []
    seen_uids: set[str] = set()
    fields: dict[str, object] | None = None
    current_tag: str | None = None
    block_offset = 0
    offset = 0
    ended = False

    def close_record(at_offset):
        nonlocal fields, current_tag
        uid = fields.get("UT")
        if not uid:
            raise ParseError(f"record block at byte {block_offset} has no UT field")
        if uid in seen_uids:
            raise ParseError(f"duplicate uid {uid!r} at byte {block_offset}")
        seen_uids.add(uid)
        year = fields.get("PY")
        if year is not None:
            year = _check_year(year, uid, at_offset)
        records.append(
            RawRecord(
                uid=uid,
                title=fields.get("TI", ""),
                abstract=fields.get("AB", ""),
                year=year,
                authors=fields.get("AU", []),
                source=fields.get("SO", ""),
                doi=fields.get("DI") or None,
                cited_refs=fields.get("CR", []),
            )
        )
        fields = None
        current_tag = None

    for raw_line in data.split(b"\n"):
        line = _decode(raw_line).rstrip("\r")
        line_len = len(raw_line) + 1
        stripped = line.strip()
        if ended and stripped:
            raise ParseError(f"content after EF at byte {offset}")
        if stripped == "EF":
            if fields is not None:
                uid = fields.get("UT", "<missing UT>")
                raise ParseError(f"record {uid!r} at byte {block_offset} missing ER terminator")
            ended = True
        elif stripped == "ER" and not line.startswith("   "):
            if fields is None:
                raise ParseError(f"ER with no open record at byte {offset}")
            close_record(offset)
        elif line.startswith("   ") and stripped:
            if fields is None or current_tag is None:
                raise ParseError(f"continuation line outside a field at byte {offset}")
            if current_tag in _TAGS_MULTI:
                fields[current_tag].append(stripped)
            else:
                fields[current_tag] = fields[current_tag] + " " + stripped
        elif stripped:
            tag, sep, value = line[:2], line[2:3], line[3:]
            if len(line) < 2 or not tag.isalnum() or not tag.isupper() or (sep and sep != " "):
                raise ParseError(f"malformed field line {line!r} at byte {offset}")
            if fields is None:
                fields = {}
                block_offset = offset
            value = value.strip()
            if tag in _TAGS_MULTI:
                fields.setdefault(tag, []).append(value)
            else:
                fields[tag] = value
            current_tag = tag
        offset += line_len

    if fields is not None:
        uid = fields.get("UT", "<missing UT>")
        raise ParseError(f"record {uid!r} at byte {block_offset} missing ER terminator")
    return records


_LINES_KEYS = ("uid", "title", "abstract", "year", "authors", "source", "doi", "cited_refs")


def _parse_lines(data: bytes) -> list[RawRecord]:
    records: list[RawRecord] = []
    seen: set[str] = set()
    offset = 0
    for raw_line in data.split(b"\n"):
        line = _decode(raw_line).strip()
        if line:
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"bad JSON record at byte {offset}: {exc}") from exc
            uid = obj.get("uid")
            if not uid:
                raise ParseError(f"record at byte {offset} missing uid")
            if uid in seen:
                raise ParseError(f"duplicate uid {uid!r} at byte {offset}")
            seen.add(uid)
            year = obj.get("year")
            if year is not None:
                year = _check_year(year, uid, offset)
            records.append(
                RawRecord(
                    uid=uid,
                    title=obj.get("title", ""),
                    abstract=obj.get("abstract", ""),
                    year=year,
                    authors=list(obj.get("authors", [])),
                    source=obj.get("source", ""),
                    doi=obj.get("doi"),
                    cited_refs=list(obj.get("cited_refs", [])),
                )
            )
        offset += len(raw_line) + 1
    return records


def record_to_line(record: RawRecord) -> str:
    """Serialize one record as a flat JSON line (the ``lines`` format)."""
    obj = {
        "uid": record.uid,
        "title": record.title,
        "abstract": record.abstract,
        "year": record.year,
        "authors": record.authors,
        "source": record.source,
        "doi": record.doi,
        "cited_refs": record.cited_refs,
    }
    return json.dumps(obj, sort_keys=True, ensure_ascii=False)


def records_to_lines(records: list[RawRecord]) -> str:
    return "".join(record_to_line(r) + "\n" for r in records)


_NORM_RE = re.compile(r"[^a-z0-9]+")
_YEAR_RE = re.compile(r"\d{4}")
_VOL_RE = re.compile(r"V\d+", re.IGNORECASE)
_PAGE_RE = re.compile(r"P\w+", re.IGNORECASE)


def _norm(component: str) -> str:
    return _NORM_RE.sub("", component.lower())


def _surname(author: str) -> str:
    author = author.strip()
    if "," in author:
        return author.split(",", 1)[0]
    return author.split()[0] if author.split() else ""


def _doi_from_components(parts: list[str]) -> str | None:
    for part in parts:
        if part[:3].upper() == "DOI":
            cand = part[3:].strip().lstrip(":").strip()
            if cand:
                return cand
        elif part.startswith("10.") and "/" in part:
            return part
    return None


def _composite_key(author, year, source, volume, page) -> str:
    return "|".join([_norm(author), str(year), _norm(source), _norm(volume), _norm(page)])


def citation_key(ref) -> CitationKey | None:
    """Normalized key for a raw reference string or a RawRecord.

    Returns None when neither a DOI nor an author+year pair is extractable;
    absence of a key is a valid outcome, not an error.
    """
    if isinstance(ref, RawRecord):
        return _record_key(ref)

    parts = [p.strip() for p in str(ref).split(",")]
    doi = _doi_from_components(parts)
    if doi:
        return CitationKey("doi:" + doi.lower().rstrip(".,;"))

    year_idx = None
    for i, part in enumerate(parts):
        if _YEAR_RE.fullmatch(part) and YEAR_MIN <= int(part) <= YEAR_MAX:
            year_idx = i
            break
    if year_idx is None or year_idx == 0:
        return None
    author = _surname(parts[0])
    if not _norm(author):
        return None
    source = parts[year_idx + 1] if year_idx + 1 < len(parts) else ""
    volume = ""
    page = ""
    for part in parts[year_idx + 2:]:
        if not volume and _VOL_RE.fullmatch(part):
            volume = part[1:]
        elif not page and _PAGE_RE.fullmatch(part):
            page = part[1:]
    return CitationKey(_composite_key(author, parts[year_idx], source, volume, page))


def _record_key(record: RawRecord) -> CitationKey | None:
    if record.doi:
        return CitationKey("doi:" + record.doi.lower().rstrip(".,;"))
    if record.year is None or not record.authors:
        return None
    author = _surname(record.authors[0])
    if not _norm(author):
        return None
    return CitationKey(_composite_key(author, record.year, record.source, "", ""))


def resolve_citations(records: list[RawRecord]) -> Corpus:
    """Match every cited_ref against the corpus and build the link list.

    A reference resolves only when its key matches exactly one record;
    self-citations are dropped, duplicate links collapsed, and everything
    else counts as unresolved.
    """
    seen: set[str] = set()
    for r in records:
        if r.uid in seen:
            raise DataError(f"duplicate uid across records: {r.uid!r}")
        seen.add(r.uid)

    index: dict[str, list[str]] = {}
    for r in records:
        key = citation_key(r)
        if key is not None:
            index.setdefault(key.key, []).append(r.uid)

    links: set[tuple[str, str]] = set()
    unresolved = 0
    resolved = 0
    self_cites = 0
    for r in records:
        for ref in r.cited_refs:
            key = citation_key(ref)
            targets = index.get(key.key) if key is not None else None
            if not targets or len(targets) > 1:
                unresolved += 1
            elif targets[0] == r.uid:
                self_cites += 1
            else:
                resolved += 1
                links.add((r.uid, targets[0]))

    return Corpus(
        records=list(records),
        links=sorted(links),
        unresolved_count=unresolved,
        resolved_ref_count=resolved,
        self_citation_count=self_cites,
    )
