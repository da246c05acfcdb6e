"""Contract template protocol and the job phase machine constants."""

from __future__ import annotations

PHASE_CREATED = "created"
PHASE_RECRUITING = "recruiting"
PHASE_LABELING = "labeling"
PHASE_EVALUATING = "evaluating"
PHASE_COMPLETED = "completed"

ANON = ""  # submitter sentinel for anonymous label records


class Contract:
    """Base for ledger templates.

    Subclasses declare TEMPLATE_ID, CONSTRUCTOR_SCHEMA, and CALLS mapping
    call_name -> (argument schema, method name). Methods receive the call
    context first; all state lives in ctx.storage.
    """

    TEMPLATE_ID: str = ""
    CONSTRUCTOR_SCHEMA: tuple[str, ...] = ()
    CALLS: dict[str, tuple[tuple[str, ...], str]] = {}

    def constructor(self, ctx, *args) -> None:
        pass
