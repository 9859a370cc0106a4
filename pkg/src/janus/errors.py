"""Exception hierarchy and the diagnostic record shared by every stage."""

from __future__ import annotations

from dataclasses import dataclass, field


class JanusError(Exception):
    """Base class for fatal pipeline errors."""


class MalformedXml(JanusError):
    pass


class NotASchema(JanusError):
    pass


class EmptyLabel(JanusError, ValueError):
    pass


class LexiconError(JanusError):
    pass


class InvalidConfig(JanusError, ValueError):
    pass


class RoleConflict(JanusError):
    pass


class UnclassifiedConcept(JanusError):
    pass


class InvalidIri(JanusError, ValueError):
    pass


class EmptyCorpus(JanusError):
    pass


class StoreError(JanusError):
    pass


class UnsupportedVersion(StoreError):
    pass


class CorruptStore(StoreError):
    pass


@dataclass(frozen=True, order=True)
class Diagnostic:
    """A non-fatal finding: warnings from parsing/extraction/merging, errors from validation."""

    code: str
    message: str
    concepts: tuple[str, ...] = ()
    source_id: str = ""
    path: str = ""

    def to_dict(self) -> dict:
        out = {"code": self.code, "message": self.message, "concepts": list(self.concepts)}
        if self.source_id:
            out["source_id"] = self.source_id
        if self.path:
            out["path"] = self.path
        return out


@dataclass
class DiagnosticSink:
    items: list[Diagnostic] = field(default_factory=list)

    def warn(self, code: str, message: str, **kw) -> None:
        self.items.append(Diagnostic(code, message, **kw))
