"""Entity-dictionary matching over raw text.

Greedy leftmost-longest matching: scan the text left to right; at each
position the longest dictionary entry starting there wins and the scan
resumes after it, so the output spans never overlap.  Offsets are 0-based
character positions with exclusive ends, written as standoff TSV.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Match:
    start: int
    end: int  # exclusive
    surface: str


def dict_match(text: str, dictionary) -> list[Match]:
    """Non-overlapping entity mentions, leftmost-longest."""
    entries = sorted(set(dictionary) - {""}, key=lambda e: (-len(e), e))
    matches = []
    i = 0
    n = len(text)
    while i < n:
        for entry in entries:
            if text.startswith(entry, i):
                matches.append(Match(i, i + len(entry), entry))
                i += len(entry)
                break
        else:
            i += 1
    return matches


def format_standoff(matches) -> str:
    """One `start<TAB>end<TAB>surface` line per match."""
    return "".join(f"{m.start}\t{m.end}\t{m.surface}\n" for m in matches)


def write_standoff(path, matches) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_standoff(matches))
