"""The correspondence table: original surface -> replacement, stored separately.

Surfaces are matched exactly and case-sensitively; normalization is the
detector's job. One writer at a time (advisory file lock); readers work on
immutable loaded snapshots. Saves are atomic (temp file + rename) so a
crash mid-save never corrupts the previous ledger.
"""

from __future__ import annotations

import fcntl
import hashlib
import json
import os
import tempfile
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from . import __version__
from .corpus import PiiCategory

FORMAT_NAME = "redactor-ledger"


class LedgerError(ValueError):
    pass


class LedgerConflictError(LedgerError):
    """The key already maps to a different replacement."""

    def __init__(self, message: str, existing: "LedgerEntry"):
        super().__init__(message)
        self.existing = existing


class LedgerInjectivityError(LedgerError):
    """The replacement is already used by a different original."""

    def __init__(self, message: str, existing: "LedgerEntry"):
        super().__init__(message)
        self.existing = existing


class LedgerIntegrityError(LedgerError):
    pass


class LedgerLockError(LedgerError):
    pass


class CreatedBy(Enum):
    GENERATOR = "generator"
    REVIEWER = "reviewer"


@dataclass(frozen=True)
class LedgerEntry:
    original_surface: str
    pii_category: PiiCategory
    replacement: str
    languages: tuple[str, ...]
    created_by: CreatedBy
    note: str | None = None

    def to_dict(self) -> dict:
        return {
            "original_surface": self.original_surface,
            "pii_category": self.pii_category.value,
            "replacement": self.replacement,
            "languages": list(self.languages),
            "created_by": self.created_by.value,
            "note": self.note,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "LedgerEntry":
        return cls(
            original_surface=obj["original_surface"],
            pii_category=PiiCategory(obj["pii_category"]),
            replacement=obj["replacement"],
            languages=tuple(obj["languages"]),
            created_by=CreatedBy(obj["created_by"]),
            note=obj.get("note"),
        )


class Ledger:
    """Keyed collection of entries with a monotone version counter."""

    def __init__(self) -> None:
        self._entries: dict[tuple[str, PiiCategory], LedgerEntry] = {}
        self._taken: dict[PiiCategory, dict[str, str]] = {}
        self.version = 0

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Ledger):
            return NotImplemented
        return self.version == other.version and self._entries == other._entries

    def entries(self) -> list[LedgerEntry]:
        return list(self._entries.values())

    def lookup(self, original: str, category: PiiCategory) -> str | None:
        entry = self._entries.get((original, category))
        return entry.replacement if entry else None

    def get(self, original: str, category: PiiCategory) -> LedgerEntry | None:
        return self._entries.get((original, category))

    def replacement_owner(self, category: PiiCategory, replacement: str) -> str | None:
        """The original that already uses this replacement, if any."""
        return self._taken.get(category, {}).get(replacement)

    def protected_surfaces(self) -> set[str]:
        return {surface for surface, _ in self._entries}

    def record(
        self,
        original: str,
        category: PiiCategory,
        replacement: str,
        language: str,
        created_by: CreatedBy = CreatedBy.GENERATOR,
        note: str | None = None,
    ) -> LedgerEntry:
        """Insert an entry or extend its language set; bump the version.

        Raises LedgerConflictError when the key exists with a different
        replacement and LedgerInjectivityError when the replacement is
        already taken by another original of the same category.
        """
        if not original:
            raise LedgerError("original surface must be nonempty")
        if not replacement:
            raise LedgerError("replacement must be nonempty")
        if replacement == original:
            raise LedgerError(f"replacement must differ from the original surface ({original!r})")
        key = (original, category)
        existing = self._entries.get(key)
        if existing is not None:
            if existing.replacement != replacement:
                raise LedgerConflictError(
                    f"{original!r} [{category.value}] already maps to {existing.replacement!r}, "
                    f"refusing {replacement!r}",
                    existing,
                )
            if language in existing.languages:
                return existing
            updated = LedgerEntry(
                original_surface=original,
                pii_category=category,
                replacement=replacement,
                languages=tuple(sorted(set(existing.languages) | {language})),
                created_by=existing.created_by,
                note=existing.note,
            )
            self._entries[key] = updated
            self.version += 1
            return updated
        owner = self.replacement_owner(category, replacement)
        if owner is not None and owner != original:
            raise LedgerInjectivityError(
                f"replacement {replacement!r} [{category.value}] already used for {owner!r}",
                self._entries[(owner, category)],
            )
        entry = LedgerEntry(
            original_surface=original,
            pii_category=category,
            replacement=replacement,
            languages=(language,),
            created_by=created_by,
            note=note,
        )
        self._entries[key] = entry
        self._taken.setdefault(category, {})[replacement] = original
        self.version += 1
        return entry

    def checksum(self) -> str:
        return _checksum(self.entries())


def _checksum(entries: list[LedgerEntry]) -> str:
    canonical = "\n".join(
        json.dumps(e.to_dict(), ensure_ascii=False, sort_keys=True)
        for e in sorted(entries, key=lambda e: (e.pii_category.value, e.original_surface))
    )
    return "sha256:" + hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _write_payload(fh, ledger: Ledger) -> None:
    header = {
        "format": FORMAT_NAME,
        "version": ledger.version,
        "checksum": ledger.checksum(),
        "tool_version": __version__,
    }
    fh.write(json.dumps(header, ensure_ascii=False))
    fh.write("\n")
    for entry in ledger.entries():
        fh.write(json.dumps(entry.to_dict(), ensure_ascii=False))
        fh.write("\n")


def save(ledger: Ledger, path: str | Path) -> None:
    """Atomically write the ledger; exclusive advisory lock while writing."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with _ledger_lock(path):
        fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                _write_payload(fh, ledger)
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp_name, path)
        except BaseException:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
            raise


class _ledger_lock:
    """Advisory single-writer lock (<ledger>.lock); non-blocking."""

    def __init__(self, path: Path):
        self.lock_path = Path(str(path) + ".lock")
        self.fh = None

    def __enter__(self):
        self.fh = open(self.lock_path, "w")
        try:
            fcntl.flock(self.fh.fileno(), fcntl.LOCK_EX | fcntl.LOCK_NB)
        except OSError:
            self.fh.close()
            self.fh = None
            raise LedgerLockError(f"another writer holds the lock on {self.lock_path}") from None
        return self

    def __exit__(self, *exc):
        if self.fh is not None:
            fcntl.flock(self.fh.fileno(), fcntl.LOCK_UN)
            self.fh.close()
        return False


def load(path: str | Path) -> Ledger:
    """Load and verify a ledger file; never returns a partial ledger."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise LedgerIntegrityError(f"{path}: empty ledger file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise LedgerIntegrityError(f"{path}: malformed header: {exc}") from None
    if header.get("format") != FORMAT_NAME:
        raise LedgerIntegrityError(f"{path}: not a {FORMAT_NAME} file")
    ledger = Ledger()
    entries: list[LedgerEntry] = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            entries.append(LedgerEntry.from_dict(json.loads(line)))
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise LedgerIntegrityError(f"{path}: bad entry on line {line_no}: {exc}") from None
    if _checksum(entries) != header.get("checksum"):
        raise LedgerIntegrityError(f"{path}: checksum mismatch, refusing partial or tampered load")
    for entry in entries:
        ledger._entries[(entry.original_surface, entry.pii_category)] = entry
        ledger._taken.setdefault(entry.pii_category, {})[entry.replacement] = entry.original_surface
    ledger.version = int(header.get("version", 0))
    return ledger


def diff(a: Ledger, b: Ledger) -> dict[str, list[dict]]:
    """Compare two ledgers: entries only in a, only in b, and changed."""
    order = lambda k: (k[1].value, k[0])
    keys_a = {(e.original_surface, e.pii_category): e for e in a.entries()}
    keys_b = {(e.original_surface, e.pii_category): e for e in b.entries()}
    only_a = [keys_a[k].to_dict() for k in sorted(keys_a.keys() - keys_b.keys(), key=order)]
    only_b = [keys_b[k].to_dict() for k in sorted(keys_b.keys() - keys_a.keys(), key=order)]
    changed = [
        {"before": keys_a[k].to_dict(), "after": keys_b[k].to_dict()}
        for k in sorted(keys_a.keys() & keys_b.keys(), key=order)
        if keys_a[k] != keys_b[k]
    ]
    return {"only_in_a": only_a, "only_in_b": only_b, "changed": changed}
