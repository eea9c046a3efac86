"""Exception types raised across the package."""


class UForestError(Exception):
    """Base class for all errors raised by uforest."""


class InputError(UForestError):
    """Malformed input data (tables, morphisms, automata, words)."""


class OutOfRange(InputError):
    def __init__(self, i, j, value):
        super().__init__(f"table entry ({i},{j}) = {value!r} is out of range")
        self.i, self.j, self.value = i, j, value


class NonAssociative(InputError):
    def __init__(self, i, j, k, names=None):
        a, b, c = (names[i], names[j], names[k]) if names else (i, j, k)
        super().__init__(f"associativity fails for triple ({a}, {b}, {c})")
        self.triple = (i, j, k)


class UnknownLetter(InputError):
    def __init__(self, letter):
        super().__init__(f"letter {letter!r} is not in the alphabet")
        self.letter = letter


class DegenerateSplit(UForestError):
    """Sigma_1 or Sigma_2 is empty, so no block factorization exists."""


class CaseInapplicable(UForestError):
    pass


class NotAGroup(CaseInapplicable):
    pass


class MultipleImages(CaseInapplicable):
    pass


class NotGood(UForestError):
    pass


class NotReduced(UForestError):
    pass


class NoAcceptingRun(UForestError):
    pass


class NotRamsey(UForestError):
    pass


class MissingBuildReport(UForestError):
    pass


class NoParse(UForestError):
    pass


class Ambiguous(UForestError):
    def __init__(self, count):
        super().__init__(f"{count} distinct parses")
        self.count = count


class SizeOverflow(UForestError):
    pass
