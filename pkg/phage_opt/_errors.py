from __future__ import annotations


class PhageError(Exception):
    pass


class QcSyntaxError(PhageError, ValueError):
    def __init__(self, msg: str, lineno: int) -> None:
        super().__init__(f'line {lineno}: {msg}')
        self.lineno = lineno


class WidthMismatch(PhageError, ValueError):
    pass


class IdentityError(PhageError, ValueError):
    pass


class SimulationTooLarge(PhageError):
    pass


class PostSelectionError(PhageError):
    pass


class PostPassError(PhageError):
    pass
