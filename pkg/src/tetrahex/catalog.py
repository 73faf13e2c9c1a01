"""Embedded catalog of the 33 published transitive homogeneous
3-(v,{4,6},1) designs on 16..28 points, with batch verification.

Each catalog entry is a text asset holding the development group's
generators and the baseblocks, kept close to the published notation:
point labels may be decimal, single hex digits (a..f for 10..15, used at
v=16), or fibered x_i tokens (x_i means x + (v/2)*i, used at v=22).
"""
from __future__ import annotations

import re
import time
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from .canon import automorphism_group
from .classify import classify
from .designs import SetSystem, develop, tetrad_count, verify_twbd
from .perms import PermGroup, Permutation

_DATA = Path(__file__).parent / "data"

_HEXDIGITS = "abcdef"


def parse_label(token: str, v: int) -> int:
    """One point label: decimal, hex digit a..f, or fibered x_i."""
    tok = token.strip()
    if re.fullmatch(r"\d+", tok):
        x = int(tok)
    elif re.fullmatch(r"[a-f]", tok):
        x = 10 + _HEXDIGITS.index(tok)
    elif re.fullmatch(r"\d+_\d+", tok):
        if v % 2 != 0:
            raise ValueError(f"fibered label {tok!r} needs even v, got {v}")
        a, b = tok.split("_")
        if int(b) not in (0, 1) or int(a) >= v // 2:
            raise ValueError(f"fibered label {tok!r} out of range for v={v}")
        x = int(a) + (v // 2) * int(b)
    else:
        raise ValueError(f"unrecognized point label {token!r}")
    if not 0 <= x < v:
        raise ValueError(f"label {token!r} maps to {x}, out of range for v={v}")
    return x


def parse_labeled_cycles(text: str, v: int) -> Permutation:
    """Cycle notation whose points may use any catalog label form."""
    images = list(range(v))
    seen: set[int] = set()
    body = text.strip()
    if not re.fullmatch(r"(\s*\([^()]*\)\s*)+", body):
        raise ValueError(f"malformed cycle expression {text!r}")
    for cyc in re.findall(r"\(([^()]*)\)", body):
        cyc = cyc.strip()
        if not cyc:
            continue
        pts = [parse_label(t, v) for t in cyc.split(",")]
        for p in pts:
            if p in seen:
                raise ValueError(f"point {p} repeated in {text!r}")
            seen.add(p)
        for i, p in enumerate(pts):
            images[p] = pts[(i + 1) % len(pts)]
    return Permutation(images)


def parse_labeled_block(text: str, v: int) -> tuple[int, ...]:
    """A block written as {tok,tok,...} or as a compact digit string."""
    body = text.strip()
    if body.startswith("{") and body.endswith("}"):
        return tuple(sorted(parse_label(t, v) for t in body[1:-1].split(",")))
    if re.fullmatch(r"[0-9a-f]+", body):
        return tuple(sorted(parse_label(ch, v) for ch in body))
    raise ValueError(f"unrecognized block syntax {text!r}")


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    v: int
    aut_order: int | None
    hexad_tag: str
    generators: tuple[str, ...]
    baseblocks: tuple[str, ...]
    note: str = ""


def _parse_entry_text(text: str) -> CatalogEntry:
    meta: dict[str, str] = {}
    generators: list[str] = []
    baseblocks: list[str] = []
    section = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "generators":
            section = "generators"
            continue
        if line == "baseblocks":
            section = "baseblocks"
            continue
        if section == "generators":
            generators.append(line)
        elif section == "baseblocks":
            baseblocks.append(line)
        else:
            key, _, value = line.partition(" ")
            meta[key] = value.strip()
    order = meta.get("aut-order", "unknown")
    return CatalogEntry(
        id=meta["id"],
        v=int(meta["v"]),
        aut_order=None if order == "unknown" else int(order),
        hexad_tag=meta["hexads"],
        generators=tuple(generators),
        baseblocks=tuple(baseblocks),
        note=meta.get("note", ""),
    )


def _numeric_suffix(entry_id: str) -> tuple:
    m = re.fullmatch(r"([DX])(\d+)_(\d+)", entry_id)
    if not m:
        return (999, 999, entry_id)
    return (int(m.group(2)), int(m.group(3)), m.group(1))


@lru_cache(maxsize=1)
def _load_all() -> dict[str, CatalogEntry]:
    entries = {}
    for path in (_DATA / "catalog").glob("*.txt"):
        entry = _parse_entry_text(path.read_text(encoding="utf-8"))
        entries[entry.id] = entry
    return dict(sorted(entries.items(), key=lambda kv: _numeric_suffix(kv[0])))


def entry_ids() -> list[str]:
    return list(_load_all().keys())


def get(entry_id: str) -> CatalogEntry:
    entries = _load_all()
    if entry_id not in entries:
        raise KeyError(f"unknown catalog id {entry_id!r}")
    return entries[entry_id]


def base_group(entry: CatalogEntry | str) -> PermGroup:
    if isinstance(entry, str):
        entry = get(entry)
    return PermGroup([parse_labeled_cycles(g, entry.v) for g in entry.generators])


@lru_cache(maxsize=64)
def _materialize_id(entry_id: str) -> SetSystem:
    entry = get(entry_id)
    blocks = [parse_labeled_block(b, entry.v) for b in entry.baseblocks]
    return develop(blocks, base_group(entry))


def materialize(entry: CatalogEntry | str) -> SetSystem:
    entry_id = entry if isinstance(entry, str) else entry.id
    return _materialize_id(entry_id)


def hexad_system(entry: CatalogEntry | str) -> SetSystem:
    design = materialize(entry)
    return SetSystem(design.v, design.blocks_of_size(6))


def paley_biplane() -> SetSystem:
    """The 2-(11,5,2) design: quadratic residues developed modulo 11."""
    shift = Permutation([(x + 1) % 11 for x in range(11)])
    return develop([(1, 3, 4, 5, 9)], PermGroup([shift]))


def best_biplane_fixture() -> SetSystem:
    """Independent flat transcription of the v=16 design (hexads + ovals),
    kept separate from the developed entry to cross-check both copies."""
    text = (_DATA / "fixtures" / "best_biplane16.txt").read_text(encoding="utf-8")
    v = None
    blocks = []
    section = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("v "):
            v = int(line.split()[1])
            continue
        if line == "blocks":
            section = "blocks"
            continue
        if section == "blocks":
            blocks.append(parse_labeled_block(line, v))
    return SetSystem(v, blocks)


@dataclass
class EntryReport:
    id: str
    passed: bool
    failures: list[str] = field(default_factory=list)
    hexads: int = 0
    tetrads: int = 0
    tag: str = ""
    aut_order: int | None = None
    seconds: float = 0.0


@dataclass
class CatalogReport:
    entries: list[EntryReport]
    seconds: float

    @property
    def ok(self) -> bool:
        return all(e.passed for e in self.entries)

    def summary_lines(self) -> list[str]:
        lines = []
        for e in self.entries:
            status = "pass" if e.passed else "FAIL"
            aut = "-" if e.aut_order is None else str(e.aut_order)
            lines.append(
                f"{e.id:<8} {status:<4} hexads={e.hexads:<3} tetrads={e.tetrads:<4} "
                f"aut={aut:<6} {e.tag}"
                + ("" if e.passed else "  [" + "; ".join(e.failures) + "]")
            )
        n_pass = sum(1 for e in self.entries if e.passed)
        lines.append(f"{n_pass}/{len(self.entries)} entries pass "
                     f"({self.seconds:.1f}s)")
        return lines


def verify_entry(entry: CatalogEntry | str,
                 include_automorphisms: bool = True) -> EntryReport:
    """Check one entry: development is a valid homogeneous 3-(v,{4,6},1),
    block counts, classification tag, and (optionally) full group order."""
    if isinstance(entry, str):
        entry = get(entry)
    t0 = time.perf_counter()
    report = EntryReport(id=entry.id, passed=True)
    try:
        design = materialize(entry)
    except Exception as exc:  # data errors surface as entry failures
        report.passed = False
        report.failures.append(f"materialize: {exc}")
        report.seconds = time.perf_counter() - t0
        return report
    v = entry.v
    hexads = design.blocks_of_size(6)
    tetrads = design.blocks_of_size(4)
    report.hexads = len(hexads)
    report.tetrads = len(tetrads)
    balance = verify_twbd(design, 3, {4, 6}, 1)
    if not balance:
        report.failures.append(
            f"not 3-wise balanced: witness {balance.witness} x{balance.count}")
    if len(hexads) != v:
        report.failures.append(f"expected {v} hexads, got {len(hexads)}")
    expected_tetrads = tetrad_count(v)
    if len(tetrads) != expected_tetrads:
        report.failures.append(
            f"expected {expected_tetrads} tetrads, got {len(tetrads)}")
    verdict = classify(SetSystem(v, hexads))
    report.tag = verdict.tag()
    if verdict.tag() != entry.hexad_tag:
        report.failures.append(
            f"hexad tag {verdict.tag()!r} != expected {entry.hexad_tag!r}")
    if verdict.gd_formula_conflict:
        report.failures.append("group-divisible index conventions disagree")
    if include_automorphisms:
        _, order = automorphism_group(design)
        report.aut_order = order
        if entry.aut_order is not None and order != entry.aut_order:
            report.failures.append(
                f"aut order {order} != expected {entry.aut_order}")
    report.passed = not report.failures
    report.seconds = time.perf_counter() - t0
    return report


def verify_all(include_automorphisms: bool = True) -> CatalogReport:
    t0 = time.perf_counter()
    reports = [verify_entry(eid, include_automorphisms) for eid in entry_ids()]
    return CatalogReport(reports, time.perf_counter() - t0)
