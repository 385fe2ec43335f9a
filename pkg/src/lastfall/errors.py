"""Exception types raised across the library."""


class LastfallError(Exception):
    """Base class for library-specific errors."""


class NonPrimeCharacteristic(LastfallError):
    pass


class ReducibleModulus(LastfallError):
    """A supplied modulus factors over its base field; carries the modulus."""

    def __init__(self, which, coeffs):
        self.which = which
        self.coeffs = tuple(coeffs)
        super().__init__(f"modulus {which} = {list(coeffs)} is reducible")


class DivisionByZero(LastfallError, ZeroDivisionError):
    pass


class NotABasis(LastfallError):
    pass


class RingMismatch(LastfallError):
    pass


class UnassignedVariable(LastfallError):
    pass


class DegreeTooHigh(LastfallError):
    pass


class StepBudgetExceeded(LastfallError):
    pass


class NotADivisor(LastfallError):
    pass


class DegreeExceedsBound(LastfallError):
    pass


class NotCoprime(LastfallError):
    """gcd was expected to be 1; carries the offending gcd as witness."""

    def __init__(self, gcd_coeffs):
        self.gcd = tuple(gcd_coeffs)
        super().__init__(f"polynomials are not coprime, gcd has degree {len(self.gcd) - 1}")


class GcdConditionFailed(LastfallError):
    pass


class SearchBudgetExceeded(LastfallError):
    pass


class NotReducible(LastfallError):
    pass


class CoordinateNotInField(LastfallError):
    pass
