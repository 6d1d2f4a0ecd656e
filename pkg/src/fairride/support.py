"""Complaint tickets with visible status and expected completion times."""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import datetime, timedelta


class EmptyComplaint(ValueError):
    pass


class IllegalTransition(Exception):
    pass


CATEGORIES = ("pay", "safety", "app", "ratings", "other")

# hours to expected completion, by category
DEFAULT_SLA_HOURS = {"safety": 24, "pay": 48, "ratings": 72, "app": 96, "other": 96}

_TRANSITIONS = {
    "open": ("in_review",),
    "in_review": ("resolved", "rejected"),
    "resolved": (),
    "rejected": (),
}


@dataclass(frozen=True)
class ComplaintTicket:
    ticket_id: str
    driver_id: str
    category: str
    text: str
    status: str
    opened_at: datetime
    expected_completion: datetime
    history: tuple[tuple[str, datetime], ...]

    def to_dict(self) -> dict:
        return {
            "ticket_id": self.ticket_id,
            "driver_id": self.driver_id,
            "category": self.category,
            "text": self.text,
            "status": self.status,
            "opened_at": self.opened_at.isoformat(),
            "expected_completion": self.expected_completion.isoformat(),
            "history": [[status, ts.isoformat()] for status, ts in self.history],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ComplaintTicket":
        data = dict(data)
        data["opened_at"] = datetime.fromisoformat(data["opened_at"])
        data["expected_completion"] = datetime.fromisoformat(data["expected_completion"])
        data["history"] = tuple(
            (status, datetime.fromisoformat(ts)) for status, ts in data["history"]
        )
        return cls(**data)


def open_complaint(
    driver_id: str,
    category: str,
    text: str,
    clock: datetime,
    sla_hours: dict[str, int] | None = None,
    ticket_id: str | None = None,
) -> ComplaintTicket:
    """File a ticket; the expected completion is disclosed immediately."""
    if not text.strip():
        raise EmptyComplaint("complaint text must not be empty")
    if category not in CATEGORIES:
        raise ValueError(f"unknown complaint category {category!r}")
    sla = DEFAULT_SLA_HOURS if sla_hours is None else sla_hours
    return ComplaintTicket(
        ticket_id=ticket_id or f"ticket-{driver_id}-{clock.timestamp():.0f}",
        driver_id=driver_id,
        category=category,
        text=text,
        status="open",
        opened_at=clock,
        expected_completion=clock + timedelta(hours=sla[category]),
        history=(("open", clock),),
    )


def advance_ticket(ticket: ComplaintTicket, new_status: str, clock: datetime) -> ComplaintTicket:
    """Move a ticket along its lifecycle: open -> in_review -> resolved/rejected."""
    if new_status not in _TRANSITIONS:
        raise IllegalTransition(f"unknown status {new_status!r}")
    if new_status not in _TRANSITIONS[ticket.status]:
        raise IllegalTransition(f"cannot move ticket from {ticket.status!r} to {new_status!r}")
    last_ts = ticket.history[-1][1]
    if clock <= last_ts:
        raise IllegalTransition("ticket history timestamps must strictly increase")
    return replace(
        ticket,
        status=new_status,
        history=ticket.history + ((new_status, clock),),
    )


def ticket_history_tsv(ticket: ComplaintTicket) -> str:
    """Audit export: one tab-separated history row per status change."""
    lines = ["ticket_id\tcategory\tstatus\ttimestamp"]
    for status, ts in ticket.history:
        lines.append(f"{ticket.ticket_id}\t{ticket.category}\t{status}\t{ts.isoformat()}")
    return "\n".join(lines) + "\n"
