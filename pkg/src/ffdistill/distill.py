"""Turn teacher scores into a student transfer set.

Teacher logits are softened per teacher with a temperature (σ of the logit
gap divided by T), then the per-teacher scores are ensembled by plain
averaging. Softening happens before averaging: each teacher contributes its
own prediction, not raw logits. Teachers that export a bare probability pass
through unsoftened (recovering logits from a clipped probability is lossy).

Streams join by exact byte-equality on the (query, title) key via a
single-pass sort-merge, so billion-row score files never need to fit in
memory.

File formats (UTF-8, tab-separated):
  teacher scores  header `#teacher-scores v1 teacher=<id> kind={logits|prob}`
                  rows `query<TAB>title<TAB>z_pos<TAB>z_neg` (kind=logits)
                  or `query<TAB>title<TAB>prob` (kind=prob),
                  sorted by (query, title), keys unique
  transfer set    header `#transfer v1 T=<temp> teachers=<k>`
                  rows `query<TAB>title<TAB>soft_label<TAB>provenance`
  behavior log    header `#behavior v1`, rows
                  `query<TAB>title<TAB>orders<TAB>displays<TAB>clicks<TAB>skips`,
                  sorted by (query, title)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from ffdistill.errors import FormatError, InputError
from ffdistill.numerics import sigmoid_scalar

PROVENANCE_DISTILLED = "distilled"
PROVENANCE_BEHAVIORAL = "behavioral_positive"

POLICY_STRICT = "strict"
POLICY_RELAXED = "relaxed"
POLICY_NONE = "none"
POLICIES = (POLICY_STRICT, POLICY_RELAXED, POLICY_NONE)

TEACHER_HEADER_PREFIX = "#teacher-scores v1"
TRANSFER_HEADER_PREFIX = "#transfer v1"
BEHAVIOR_HEADER = "#behavior v1"

# Engagement thresholds for the two filtering regimes.
STRICT_DISPLAY_FLOOR = 20
RELAXED_SKIP_FLOOR = 5


@dataclass(frozen=True)
class TeacherScoreRecord:
    """One teacher's output for one pair: either a logit pair or a single
    probability, never both."""

    query: str
    title: str
    teacher_id: str
    logits: Optional[tuple[float, float]] = None
    probability: Optional[float] = None

    def __post_init__(self):
        if (self.logits is None) == (self.probability is None):
            raise ValueError("exactly one of logits/probability must be set")
        if self.probability is not None and not 0.0 <= self.probability <= 1.0:
            raise ValueError(f"probability {self.probability} outside [0, 1]")

    @property
    def key(self) -> tuple[bytes, bytes]:
        return (self.query.encode("utf-8"), self.title.encode("utf-8"))


@dataclass(frozen=True)
class TransferExample:
    query: str
    title: str
    soft_label: float
    provenance: str = PROVENANCE_DISTILLED

    def __post_init__(self):
        if not 0.0 <= self.soft_label <= 1.0:
            raise ValueError(f"soft_label {self.soft_label} outside [0, 1]")


@dataclass(frozen=True)
class BehaviorRecord:
    query: str
    title: str
    orders: int
    displays: int
    clicks: int
    skips: int

    def __post_init__(self):
        if min(self.orders, self.displays, self.clicks, self.skips) < 0:
            raise ValueError("behavior counts must be non-negative")
        if self.clicks > self.displays:
            raise ValueError(f"clicks {self.clicks} exceed displays {self.displays}")

    @property
    def key(self) -> tuple[bytes, bytes]:
        return (self.query.encode("utf-8"), self.title.encode("utf-8"))


@dataclass
class JoinReport:
    """Accounting for one transfer-set build."""

    matched: int = 0
    unmatched: int = 0
    dropped: int = 0
    behavioral_positives: int = 0
    missing_behavior: int = 0
    skipped_lines: int = 0

    def as_text(self) -> str:
        return "".join(f"{k}\t{v}\n" for k, v in vars(self).items())


def soften(logits: tuple[float, float], temperature: float) -> float:
    """Two-class temperature softmax for the positive class, computed in the
    stable logistic form σ((z_pos − z_neg)/T)."""
    if temperature <= 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    z_pos, z_neg = logits
    if not (math.isfinite(z_pos) and math.isfinite(z_neg)):
        raise ValueError(f"logits must be finite, got {logits}")
    return sigmoid_scalar((z_pos - z_neg) / temperature)


def stack_scores(per_teacher: Iterable[float]) -> float:
    """Meta label = arithmetic mean of the teachers' scores; the same rule
    covers same-architecture and mixed-architecture ensembles."""
    scores = list(per_teacher)
    if not scores:
        raise ValueError("stack_scores needs at least one teacher score")
    for s in scores:
        if not 0.0 <= s <= 1.0:
            raise ValueError(f"teacher score {s} outside [0, 1]")
    return math.fsum(scores) / len(scores)


def behavior_filter(record: BehaviorRecord, policy: str) -> tuple[bool, Optional[int]]:
    """Engagement-based keep/drop plus a diagnostic hard-label hint.

    strict: keep pairs ordered at least once (hint 1) or displayed 20+
    times without a click (hint 0). relaxed: keep pairs clicked at least
    once (hint 1) or skipped 5+ times (hint 0). none: keep everything,
    no hint. Training labels always come from teachers; the hint is
    diagnostic only.
    """
    if policy == POLICY_NONE:
        return True, None
    if policy == POLICY_STRICT:
        if record.orders >= 1:
            return True, 1
        if record.displays >= STRICT_DISPLAY_FLOOR and record.clicks == 0:
            return True, 0
        return False, None
    if policy == POLICY_RELAXED:
        if record.clicks >= 1:
            return True, 1
        if record.skips >= RELAXED_SKIP_FLOOR:
            return True, 0
        return False, None
    raise ValueError(f"unknown policy {policy!r}; expected one of {POLICIES}")


def _soft_score(record: TeacherScoreRecord, temperature: float) -> float:
    if record.logits is not None:
        return soften(record.logits, temperature)
    return record.probability


class _SortedStream:
    """Wraps a record iterator, enforcing strictly ascending keys."""

    def __init__(self, records: Iterator, name: str):
        self.name = name
        self._it = iter(records)
        self.head = None
        self._last_key = None
        self.advance()

    def advance(self) -> None:
        try:
            rec = next(self._it)
        except StopIteration:
            self.head = None
            return
        key = rec.key
        if self._last_key is not None:
            if key == self._last_key:
                raise InputError(f"{self.name}: duplicate key {_show_key(key)}")
            if key < self._last_key:
                raise InputError(f"{self.name}: records not sorted at key {_show_key(key)}")
        self._last_key = key
        self.head = rec


def _show_key(key: tuple[bytes, bytes]) -> str:
    return f"({key[0].decode('utf-8', 'replace')!r}, {key[1].decode('utf-8', 'replace')!r})"


def build_transfer_set(score_streams, temperature: float,
                       behavior=None, policy: str = POLICY_NONE,
                       click_positives=None) -> tuple[list[TransferExample], JoinReport]:
    """Join per-teacher score streams on the (query, title) key, soften,
    stack, apply the behavior filter, then append click positives with
    label 1.0.

    Every stream must be sorted by key with unique keys. Keys missing from
    any teacher are counted as unmatched and skipped; pairs the behavior
    filter rejects are counted as dropped. Pairs with no behavior record are
    kept (no evidence to drop them) and tallied.
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}; expected one of {POLICIES}")
    if temperature <= 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    streams = [_SortedStream(s, f"teacher stream {i}") for i, s in enumerate(score_streams)]
    if not streams:
        raise ValueError("build_transfer_set needs at least one score stream")
    behavior_stream = None if behavior is None else _SortedStream(behavior, "behavior stream")

    report = JoinReport()
    out: list[TransferExample] = []
    saw_any_record = any(s.head is not None for s in streams)
    while all(s.head is not None for s in streams):
        low = min(s.head.key for s in streams)
        holders = [s for s in streams if s.head.key == low]
        if len(holders) == len(streams):
            rec = holders[0].head
            label = stack_scores(_soft_score(s.head, temperature) for s in streams)
            keep = True
            if behavior_stream is not None and policy != POLICY_NONE:
                while (behavior_stream.head is not None
                       and behavior_stream.head.key < low):
                    behavior_stream.advance()
                if behavior_stream.head is not None and behavior_stream.head.key == low:
                    keep, _ = behavior_filter(behavior_stream.head, policy)
                else:
                    report.missing_behavior += 1
            if keep:
                report.matched += 1
                out.append(TransferExample(rec.query, rec.title, label, PROVENANCE_DISTILLED))
            else:
                report.dropped += 1
        else:
            report.unmatched += 1
        for s in holders:
            s.advance()
    # Keys remaining in any stream after another is exhausted are unmatched.
    for s in streams:
        while s.head is not None:
            report.unmatched += 1
            low = s.head.key
            for other in streams:
                if other.head is not None and other.head.key == low:
                    other.advance()

    if saw_any_record and report.matched == 0 and report.dropped == 0:
        raise InputError("teacher streams share no (query, title) keys")

    if click_positives is not None:
        for query, title in click_positives:
            out.append(TransferExample(query, title, 1.0, PROVENANCE_BEHAVIORAL))
            report.behavioral_positives += 1
    return out, report


# ---------------------------------------------------------------------------
# file I/O


def _parse_header_fields(path, line: str) -> dict[str, str]:
    fields = {}
    for part in line.split(" ")[2:]:
        if "=" not in part:
            raise FormatError(path, 1, f"malformed header field {part!r} in {line!r}")
        k, v = part.split("=", 1)
        fields[k] = v
    return fields


def read_teacher_scores(path) -> Iterator[TeacherScoreRecord]:
    """Stream records from a teacher score file, validating as it goes."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if not header.startswith(TEACHER_HEADER_PREFIX):
            raise FormatError(path, 1, f"expected header {TEACHER_HEADER_PREFIX!r}..., got {header!r}")
        fields = _parse_header_fields(path, header)
        teacher_id = fields.get("teacher")
        kind = fields.get("kind")
        if not teacher_id or kind not in ("logits", "prob"):
            raise FormatError(path, 1, f"header must carry teacher=<id> and kind=logits|prob, got {header!r}")
        expected = 4 if kind == "logits" else 3
        for line_no, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) != expected:
                raise FormatError(path, line_no,
                                  f"expected {expected} tab-separated fields for kind={kind}, got {len(cols)}")
            try:
                if kind == "logits":
                    yield TeacherScoreRecord(cols[0], cols[1], teacher_id,
                                             logits=(float(cols[2]), float(cols[3])))
                else:
                    yield TeacherScoreRecord(cols[0], cols[1], teacher_id,
                                             probability=float(cols[2]))
            except ValueError as exc:
                raise FormatError(path, line_no, str(exc)) from None


def write_teacher_scores(records, path, teacher_id: str, kind: str = "logits") -> None:
    if kind not in ("logits", "prob"):
        raise ValueError(f"kind must be logits or prob, got {kind!r}")
    if not teacher_id or any(c.isspace() for c in teacher_id):
        raise ValueError(f"teacher id must be non-empty and whitespace-free, got {teacher_id!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{TEACHER_HEADER_PREFIX} teacher={teacher_id} kind={kind}\n")
        for rec in records:
            if kind == "logits":
                fh.write(f"{rec.query}\t{rec.title}\t{float(rec.logits[0])!r}\t{float(rec.logits[1])!r}\n")
            else:
                fh.write(f"{rec.query}\t{rec.title}\t{float(rec.probability)!r}\n")


def write_transfer_file(examples, path, temperature: float, teachers: int) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{TRANSFER_HEADER_PREFIX} T={float(temperature)!r} teachers={teachers}\n")
        for ex in examples:
            fh.write(f"{ex.query}\t{ex.title}\t{float(ex.soft_label)!r}\t{ex.provenance}\n")


def read_transfer_file(path) -> list[TransferExample]:
    out: list[TransferExample] = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if not header.startswith(TRANSFER_HEADER_PREFIX):
            raise FormatError(path, 1, f"expected header {TRANSFER_HEADER_PREFIX!r}..., got {header!r}")
        for line_no, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) != 4:
                raise FormatError(path, line_no, f"expected 4 tab-separated fields, got {len(cols)}")
            if cols[3] not in (PROVENANCE_DISTILLED, PROVENANCE_BEHAVIORAL):
                raise FormatError(path, line_no, f"unknown provenance {cols[3]!r}")
            try:
                out.append(TransferExample(cols[0], cols[1], float(cols[2]), cols[3]))
            except ValueError as exc:
                raise FormatError(path, line_no, str(exc)) from None
    return out


def read_behavior_file(path) -> Iterator[BehaviorRecord]:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != BEHAVIOR_HEADER:
            raise FormatError(path, 1, f"expected header {BEHAVIOR_HEADER!r}, got {header!r}")
        for line_no, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) != 6:
                raise FormatError(path, line_no, f"expected 6 tab-separated fields, got {len(cols)}")
            try:
                yield BehaviorRecord(cols[0], cols[1], *(int(c) for c in cols[2:]))
            except ValueError as exc:
                raise FormatError(path, line_no, str(exc)) from None


def write_behavior_file(records, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(BEHAVIOR_HEADER + "\n")
        for r in records:
            fh.write(f"{r.query}\t{r.title}\t{r.orders}\t{r.displays}\t{r.clicks}\t{r.skips}\n")
