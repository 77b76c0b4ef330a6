"""Evaluation errors shared by the semantic engines."""


class UnboundVar(KeyError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unbound variable {name}")

    def __str__(self):
        return f"unbound variable {self.name}"


class NonObjectDeref(ValueError):
    """A field read whose receiver does not denote an object of the universe."""


class NotSLFragment(ValueError):
    pass
