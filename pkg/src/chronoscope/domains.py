"""Hostname parsing under a national suffix policy.

URLs are reduced to third-level domains such as ``ox.ac.uk``: the unit every
graph in this package aggregates to.  A :class:`SuffixPolicy` says which
country-code TLD is in scope and which second-level domains (``ac.uk``,
``co.uk``, ...) are registration suffixes beneath it.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from urllib.parse import urlsplit

from .errors import MalformedUrl, OutOfScopeTld, PolicyFileError, UnknownSld

# Unknown-SLD handling modes.
REJECT = "reject"
TREAT_AS_2LEVEL = "treat-as-2-level"

# Returned by classify_sld() for hosts registered directly under the ccTLD
# (only reachable under TREAT_AS_2LEVEL policies).
TWO_LEVEL_MARKER = "<2ld>"

# Synthetic bucket used by the statistics paths for nodes whose suffix is not
# in the registered set.
OTHER_SLD = "other"

#: SLDs shipped with the default .uk policy.
DEFAULT_UK_SLDS = ("ac.uk", "co.uk", "gov.uk", "org.uk")


@dataclass(frozen=True)
class SuffixPolicy:
    """Scope of the domain hierarchy: one ccTLD plus its registered SLDs.

    ``unknown_sld`` controls what happens to hosts under the ccTLD whose
    second-level domain is not registered: ``REJECT`` raises, while
    ``TREAT_AS_2LEVEL`` makes the two-label registration itself the
    aggregation unit.
    """

    cctld: str
    registered_slds: frozenset[str]
    unknown_sld: str = REJECT

    def __post_init__(self):
        cctld = self.cctld.lower()
        object.__setattr__(self, "cctld", cctld)
        slds = frozenset(s.lower() for s in self.registered_slds)
        object.__setattr__(self, "registered_slds", slds)
        if not cctld or "." in cctld:
            raise PolicyFileError(f"ccTLD must be a single label, got {cctld!r}")
        if not slds:
            raise PolicyFileError("policy needs at least one registered SLD")
        for sld in slds:
            if not sld.endswith("." + cctld):
                raise PolicyFileError(f"SLD {sld!r} is not under .{cctld}")
        if self.unknown_sld not in (REJECT, TREAT_AS_2LEVEL):
            raise PolicyFileError(
                f"unknown_sld must be {REJECT!r} or {TREAT_AS_2LEVEL!r}"
            )


@dataclass(frozen=True)
class DomainKey:
    """A hostname reduced to its place in the TLD/SLD hierarchy.

    ``third_level`` is the aggregation unit, e.g. ``ox.ac.uk``.  Under a
    TREAT_AS_2LEVEL policy it may instead be a two-label registration, in
    which case ``sld`` is the bare ccTLD.
    """

    tld: str
    sld: str
    third_level: str


def default_policy(unknown_sld: str = REJECT) -> SuffixPolicy:
    """The .uk policy with the four large registered SLDs."""
    return SuffixPolicy("uk", frozenset(DEFAULT_UK_SLDS), unknown_sld)


def load_policy(path, unknown_sld: str = REJECT) -> SuffixPolicy:
    """Read a suffix policy file.

    Format: UTF-8 text, ``#`` starts a comment, blank lines ignored; the
    first non-comment line is the ccTLD and every following line one SLD.
    """
    entries = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip().lower()
        if line:
            entries.append(line)
    if len(entries) < 2:
        raise PolicyFileError(f"{path}: need a ccTLD line and at least one SLD")
    return SuffixPolicy(entries[0], frozenset(entries[1:]), unknown_sld)


def parse_host_key(host: str, policy: SuffixPolicy) -> DomainKey:
    """Reduce a bare hostname to a :class:`DomainKey`.

    The hostname is lowercased, a trailing dot and exactly one leading
    ``www.`` label are stripped, and the third-level domain is taken from the
    tail of the label sequence, so deeper hosts (``mail.ox.ac.uk``) aggregate
    with their institution.  Only ASCII hostnames are accepted.
    """
    host = host.lower().rstrip(".")
    if not host:
        raise MalformedUrl("empty hostname")
    if not host.isascii():
        raise MalformedUrl(f"non-ASCII hostname {host!r}")
    if host.startswith("www."):
        host = host[4:]
    labels = host.split(".")
    if any(not label for label in labels):
        raise MalformedUrl(f"empty label in hostname {host!r}")
    if labels[-1] != policy.cctld:
        raise OutOfScopeTld(f"{host!r} is not under .{policy.cctld}")
    if len(labels) < 2:
        raise MalformedUrl(f"{host!r} is the bare ccTLD")
    sld = labels[-2] + "." + labels[-1]
    if sld in policy.registered_slds:
        if len(labels) < 3:
            raise MalformedUrl(f"{host!r} has no label under {sld!r}")
        third = labels[-3] + "." + sld
        return DomainKey(policy.cctld, sld, third)
    if policy.unknown_sld == TREAT_AS_2LEVEL:
        return DomainKey(policy.cctld, policy.cctld, sld)
    raise UnknownSld(f"{sld!r} is not a registered SLD")


def parse_domain_key(url: str, policy: SuffixPolicy) -> DomainKey:
    """Parse an absolute URL down to its third-level domain.

    >>> parse_domain_key("http://www.ox.ac.uk/about", default_policy())
    DomainKey(tld='uk', sld='ac.uk', third_level='ox.ac.uk')

    Paths, queries, fragments and ports are ignored; only the hostname
    matters.
    """
    try:
        host = urlsplit(url).hostname
    except ValueError as exc:
        raise MalformedUrl(f"unparseable URL {url!r}: {exc}") from None
    if not host:
        raise MalformedUrl(f"no hostname in {url!r}")
    return parse_host_key(host, policy)


def classify_sld(key: DomainKey, policy: SuffixPolicy) -> str:
    """Registered SLD of a parsed key, or the two-level marker."""
    if key.sld in policy.registered_slds:
        return key.sld
    return TWO_LEVEL_MARKER


def sld_label(third_level: str, policy: SuffixPolicy) -> str:
    """SLD bucket for a third-level domain string in statistics paths.

    Unlike :func:`classify_sld` this never fails: anything whose two-label
    tail is not a registered SLD lands in the synthetic ``other`` bucket.
    """
    parts = third_level.rsplit(".", 2)
    if len(parts) >= 2:
        sld = parts[-2] + "." + parts[-1]
        if sld in policy.registered_slds:
            return sld
    return OTHER_SLD
