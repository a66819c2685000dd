"""Exception types shared across the package."""


class ArenaError(ValueError):
    """Malformed arena text, JSON, or start placement."""


class ScenarioError(ValueError):
    """Malformed or inconsistent scenario description."""


class IllegalMoveError(ValueError):
    """A joint move that violates the movement rules.

    ``clause`` names the violated rule (e.g. "CopsSwitch", "CollideWithWall")
    so callers can surface it without parsing the message.
    """

    def __init__(self, clause: str, message: str | None = None):
        super().__init__(message or clause)
        self.clause = clause


class CapExceededError(RuntimeError):
    """State or belief enumeration exceeded the configured cap."""


class MalformedTraceError(ValueError):
    """A trace that no sequence of moves could have produced."""
