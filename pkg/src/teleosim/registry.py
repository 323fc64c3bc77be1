"""Client-side keyed object registry driven by scene update messages."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from .geometry import Pose, Twist
from .messages import ObjectSpec, SceneUpdateMessage


@dataclass
class ObjectRecord:
    key: int
    spec: ObjectSpec
    pose: Pose
    twist: Twist
    last_update_seq: int


@dataclass
class ApplyReport:
    """Counts of what one scene update actually did."""

    created: int = 0
    updated: int = 0
    deleted: int = 0
    replaced: int = 0
    skipped_unknown: int = 0
    missing_deletes: int = 0
    # Update keys that were skipped because no record existed, in order.
    unknown_keys: tuple[int, ...] = field(default=())


class SceneRegistry:
    """Replays create/update/delete lifecycles; remembers unknown update keys.

    Apply order within a message is deletes, then creates, then updates, so a
    message may delete and recreate the same key. A create for an existing key
    replaces the record (delete-then-create). An update for an absent key is
    skipped and the key is queued, once, for the next drain_unknown().
    """

    def __init__(self) -> None:
        self._records: dict[int, ObjectRecord] = {}
        self._unknown: dict[int, None] = {}  # insertion-ordered set
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._records)

    def get(self, key: int) -> ObjectRecord | None:
        with self._lock:
            return self._records.get(key)

    def apply_scene_update(self, msg: SceneUpdateMessage) -> ApplyReport:
        report = ApplyReport()
        skipped: list[int] = []
        with self._lock:
            for key in msg.deletes:
                if key in self._records:
                    del self._records[key]
                    report.deleted += 1
                else:
                    report.missing_deletes += 1
            for cre in msg.creates:
                if cre.key in self._records:
                    del self._records[cre.key]
                    report.replaced += 1
                else:
                    report.created += 1
                self._records[cre.key] = ObjectRecord(
                    key=cre.key,
                    spec=cre.spec,
                    pose=cre.pose,
                    twist=cre.twist,
                    last_update_seq=msg.seq,
                )
            for upd in msg.updates:
                rec = self._records.get(upd.key)
                if rec is None:
                    report.skipped_unknown += 1
                    skipped.append(upd.key)
                    self._unknown.setdefault(upd.key)
                else:
                    rec.pose = upd.pose
                    rec.twist = upd.twist
                    rec.last_update_seq = msg.seq
                    report.updated += 1
        report.unknown_keys = tuple(skipped)
        return report

    def drain_unknown(self) -> list[int]:
        """Unknown keys in first-seen order; clears the set."""
        with self._lock:
            keys = list(self._unknown)
            self._unknown.clear()
            return keys

    def peek_unknown(self) -> list[int]:
        with self._lock:
            return list(self._unknown)

    def known_keys(self) -> list[int]:
        """Live keys, ascending."""
        with self._lock:
            return sorted(self._records)

    def snapshot(self) -> list[ObjectRecord]:
        """Consistent copy of all records, ascending by key."""
        with self._lock:
            return [
                ObjectRecord(
                    key=rec.key,
                    spec=rec.spec,
                    pose=rec.pose,
                    twist=rec.twist,
                    last_update_seq=rec.last_update_seq,
                )
                for _, rec in sorted(self._records.items())
            ]

    def snapshot_lines(self) -> list[str]:
        """One object per line: key, kind, pose, twist, color."""
        lines = []
        for rec in self.snapshot():
            fields = [str(rec.key), str(rec.spec.kind)]
            fields += [repr(v) for v in rec.pose.position]
            fields += [repr(v) for v in rec.pose.orientation]
            fields += [repr(v) for v in rec.twist.linear]
            fields += [repr(v) for v in rec.twist.angular]
            fields += [repr(v) for v in rec.spec.color]
            lines.append(" ".join(fields))
        return lines
