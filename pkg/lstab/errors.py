"""Exception hierarchy. Every error carries the CLI exit code it maps to."""


class LStabError(Exception):
    exit_code = 1


class ConfigError(LStabError):
    """Bad flags, bad spec file, bad engine parameters."""

    exit_code = 1


class DataError(LStabError, ValueError):
    exit_code = 2


class SchemaError(DataError):
    pass


class ParseError(DataError):
    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.row = row
        self.column = column


class IntegrityError(DataError):
    pass


class DimensionError(DataError):
    pass


class DomainError(DataError):
    pass


class UnsupportedOperationError(DataError):
    pass


class TupleNotFoundError(DataError, LookupError):
    pass


class GridSizeError(DataError):
    pass


class RankingError(LStabError):
    """The external ranking process failed or emitted a malformed order."""

    exit_code = 3
