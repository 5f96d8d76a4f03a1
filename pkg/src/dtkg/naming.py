"""IRI to identifier mapping used when a graph becomes a typed store."""

from __future__ import annotations

import re

_NON_ALNUM = re.compile(r"[^A-Za-z0-9]")


def local_name(iri: str) -> str:
    cut = max(iri.rfind("/"), iri.rfind("#"))
    return iri[cut + 1 :]


def _safe(ident: str) -> str:
    if not ident or ident[0].isdigit():
        return "_" + ident
    return ident


def type_name(iri: str) -> str:
    """``http://example.org/Person`` -> ``Person`` (case of the first letter kept)."""
    return _safe(_NON_ALNUM.sub("_", local_name(iri)))


def term_name(iri: str) -> str:
    """``http://example.org/Barack`` -> ``barack``."""
    s = _NON_ALNUM.sub("_", local_name(iri))
    return _safe(s[:1].lower() + s[1:])


def relation_name(iri: str) -> str:
    """``http://example.org/father`` -> ``FatherOf``; ``has-parent`` -> ``HasParentOf``."""
    parts = [p for p in _NON_ALNUM.split(local_name(iri)) if p]
    return _safe("".join(p[:1].upper() + p[1:] for p in parts) + "Of")
