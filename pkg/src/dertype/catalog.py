"""The shipped catalog: gentle and nodal two-point algebras, the local list,
the two deformations and the wild shapes.

Entries live in ``data/catalog.json`` so that table corrections are data edits.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Dict, List, Optional

from .dsl import parse_presentation
from .forms import BOXES, BoxSpec
from .quiver import Presentation


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    family: str
    derived_class: str
    presentation: Optional[Presentation] = None
    box: Optional[BoxSpec] = None
    gentle: Optional[bool] = None
    nodal: Optional[bool] = None
    number: Optional[int] = None
    quiver_shape: Optional[str] = None
    table2_match: Optional[str] = None
    note: str = ""

    def to_json(self) -> dict:
        out = {
            "id": self.id,
            "family": self.family,
            "derived_class": self.derived_class,
            "gentle": self.gentle,
            "nodal": self.nodal,
            "note": self.note,
        }
        if self.presentation is not None:
            out["dsl"] = self.presentation.to_dsl()
            out["quiver"] = self.quiver_shape
        if self.box is not None:
            out["box"] = {"vertices": list(self.box.vertices), "solid": [list(a) for a in self.box.solid],
                          "dashed": [list(a) for a in self.box.dashed]}
        if self.table2_match:
            out["table2_match"] = self.table2_match
        return out


@lru_cache(maxsize=1)
def _raw():
    with resources.files("dertype").joinpath("data/catalog.json").open() as fh:
        return json.load(fh)


@lru_cache(maxsize=1)
def load_catalog() -> Dict[str, CatalogEntry]:
    out = {}
    for e in _raw()["entries"]:
        pres = parse_presentation(e["dsl"]) if "dsl" in e else None
        out[e["id"]] = CatalogEntry(
            id=e["id"], family=e["family"], derived_class=e["derived_class"], presentation=pres,
            box=BOXES.get(e.get("box")) if e.get("box") else None, gentle=e.get("gentle"),
            nodal=e.get("nodal"), number=e.get("number"), quiver_shape=e.get("quiver"),
            table2_match=e.get("table2_match"), note=e.get("note", ""),
        )
    return out


def standard_quivers() -> Dict[str, str]:
    """Arrow lists of the ten two-point quivers, keyed ``Q1``..``Q10``."""
    return dict(_raw()["quivers"])


def get_entry(entry_id: str) -> CatalogEntry:
    try:
        return load_catalog()[entry_id]
    except KeyError:
        raise KeyError(f"no catalog entry {entry_id!r}") from None


def entries(family: str | None = None) -> List[CatalogEntry]:
    return [e for e in load_catalog().values() if family is None or e.family == family]


def algebra_entries() -> List[CatalogEntry]:
    return [e for e in load_catalog().values() if e.presentation is not None]


def catalog_lookup(p: Presentation) -> Optional[CatalogEntry]:
    """Entry whose presentation equals the normalized form of ``p``, if any."""
    from .recognition import normalize_with_match

    if len(p.quiver.vertices) > 2:
        return None
    _, _, match = normalize_with_match(p)
    return get_entry(match) if match else None


def crosscheck_tables(N: int = 8) -> dict:
    """Check the relations between the two tables stated alongside them.

    (a) every nodal entry except the ninth normalizes onto its gentle twin,
    (b) the nodal flags among gentle entries reproduce under recognition,
    (c) the listed infinite non-nodal entries keep growing at truncation ``N``.
    """
    from .recognition import is_nodal, normalize_with_match
    from .truncated import TruncatedAlgebra

    items, mismatches = [], []
    for e in entries("table1"):
        _, _, match = normalize_with_match(e.presentation)
        twin = e.table2_match
        if e.number == 9:
            ok = match == "T1.9"
            msg = f"T1.9 has no gentle twin (normalizes to {match})"
        else:
            # the nodal entry and its twin share a normal form; lookup reports the first listed id
            twin_norm = normalize_with_match(get_entry(twin).presentation)[0]
            ok = normalize_with_match(e.presentation)[0] == twin_norm
            msg = f"{e.id} <-> {twin}"
        items.append({"check": "table1_embeds", "id": e.id, "ok": ok, "detail": msg})
        if not ok:
            mismatches.append(msg)
    nodal_expected = {3, 8, 9, 14, 15, 22, 23, 24}
    nodal_found = set()
    for e in entries("table2"):
        if is_nodal(e.presentation).verdict:
            nodal_found.add(e.number)
    ok = nodal_found == nodal_expected
    items.append({"check": "table2_nodal", "ok": ok, "found": sorted(nodal_found)})
    if not ok:
        mismatches.append(f"nodal flags on Table 2: {sorted(nodal_found)}")
    infinite_expected = {7, 11, 13, 17, 19, 20, 21}
    for n in sorted(infinite_expected):
        e = get_entry(f"T2.{n}")
        d1 = TruncatedAlgebra(e.presentation, N).dim()
        d2 = TruncatedAlgebra(e.presentation, N + 1).dim()
        growing = d2 > d1
        nod = is_nodal(e.presentation).verdict
        ok = growing and not nod
        items.append({"check": "infinite_not_nodal", "id": e.id, "ok": ok, "dims": [d1, d2], "nodal": nod})
        if not ok:
            mismatches.append(f"{e.id}: growing={growing} nodal={nod}")
    return {"ok": not mismatches, "items": items, "mismatches": mismatches, "truncation": N}
