"""Plain-text reports: fixed-field sections plus a records variant.

Reports are built as (section, key, value) triples so both renderings are
trivially byte-stable across reruns; artifact references use content-
derived names, never timestamps.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field


def content_name(prefix: str, text: str, suffix: str) -> str:
    h = hashlib.sha256(text.encode()).hexdigest()[:12]
    return f"{prefix}-{h}{suffix}"


@dataclass
class Report:
    rows: list[tuple[str, str, str]] = field(default_factory=list)

    def add(self, section: str, key: str, value) -> None:
        self.rows.append((section, key, str(value)))

    def section(self, name: str) -> list[tuple[str, str]]:
        return [(k, v) for s, k, v in self.rows if s == name]

    def value(self, section: str, key: str) -> str | None:
        for s, k, v in self.rows:
            if s == section and k == key:
                return v
        return None

    def render(self, fmt: str = "text") -> str:
        if fmt == "records":
            lines = [f"record {s} {k} {v}" for s, k, v in self.rows]
            return "\n".join(lines) + "\n"
        lines = []
        current = None
        for s, k, v in self.rows:
            if s != current:
                if current is not None:
                    lines.append("")
                lines.append(f"== {s} ==")
                current = s
            lines.append(f"{k}: {v}")
        return "\n".join(lines) + "\n"
