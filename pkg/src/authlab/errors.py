"""Exception hierarchy shared by every authlab module."""


class AuthLabError(Exception):
    """Base class for all errors raised by authlab."""


class ZeroNotInvertible(AuthLabError, ArithmeticError):
    pass


class NotCoprime(AuthLabError, ArithmeticError):
    pass


class BadIdentityFormat(AuthLabError, ValueError):
    pass


class DegenerateIdentity(AuthLabError, ValueError):
    """Identity reduces to 0, 1 or p-1, which would make the password trivial."""


class MalformedRequest(AuthLabError, ValueError):
    pass


class MissingSID(AuthLabError):
    """The card was asked to compute with a shadow identity it was never given.

    This is what happens on every Awasthi-Lal login: step 2 needs SID but the
    user keys in only (ID, PW) and the card stores only (f, p).
    """


class EmptyCoalition(AuthLabError, ValueError):
    pass


class RegistrationRefused(AuthLabError):
    pass


class UnsupportedCombination(AuthLabError, ValueError):
    pass
