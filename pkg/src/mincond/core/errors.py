"""Exception hierarchy shared by the graph loader, the engine, the solvers and the harness."""


class MincondError(Exception):
    """Root of every error raised by mincond."""


class GraphFormatError(MincondError, ValueError):
    pass


class MalformedLine(GraphFormatError):
    def __init__(self, path: str, line_number: int, line: str):
        super().__init__(f"{path}:{line_number}: expected two vertex labels, got {line!r}")
        self.path = path
        self.line_number = line_number
        self.line = line


class EmptyGraph(GraphFormatError):
    pass


class UndecodableFile(GraphFormatError):
    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: not valid UTF-8 text ({reason})")
        self.path = path


class LengthMismatch(MincondError, ValueError):
    pass


class UndefinedPartition(MincondError, ArithmeticError):
    pass


class UndefinedPhi(MincondError, ArithmeticError):
    pass


class SameSide(MincondError, ValueError):
    pass


class TooLarge(MincondError, ValueError):
    pass


class InvalidConfig(MincondError, ValueError):
    pass


class EmptyRecords(MincondError, ValueError):
    pass


class SeedingExceededBudget(UserWarning):
    """Initial population sampling used up the whole time limit."""
