"""Exception types shared across the engine."""


class IdssError(Exception):
    """Base class for engine errors."""


class ParseError(IdssError):
    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class DuplicateYear(IdssError):
    pass


class NonConsecutiveYears(IdssError):
    pass


class RangeError(IdssError):
    pass


class DomainError(IdssError):
    def __init__(self, message, variable=None, year=None):
        super().__init__(message)
        self.variable = variable
        self.year = year


class TransformError(IdssError):
    pass


class NumericalError(IdssError):
    pass


class InvalidInput(IdssError):
    pass


class CycleError(IdssError):
    def __init__(self, message, cycle=None):
        super().__init__(message)
        self.cycle = cycle or []


class UnknownNode(IdssError):
    pass


class MissingInput(IdssError):
    pass


class BindingError(IdssError):
    pass


class UnknownPolicy(IdssError):
    pass
