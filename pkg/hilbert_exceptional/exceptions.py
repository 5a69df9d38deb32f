class HilbertExceptionalError(Exception):
    def __init__(self, message=""):
        self.message = message

    def __str__(self):
        return self.message


class InvalidIntervalError(HilbertExceptionalError, ValueError):
    pass


class EmptySetError(HilbertExceptionalError, ValueError):
    pass


class SingularityError(HilbertExceptionalError, ArithmeticError):
    pass


class ConvergenceError(HilbertExceptionalError, RuntimeError):
    pass


class ConstructionError(HilbertExceptionalError, RuntimeError):
    pass


class ConfigError(HilbertExceptionalError, ValueError):
    pass
