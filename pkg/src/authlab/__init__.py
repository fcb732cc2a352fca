"""authlab: smart-card remote user authentication schemes and the attacks on them."""

from authlab.errors import (
    AuthLabError,
    BadIdentityFormat,
    DegenerateIdentity,
    EmptyCoalition,
    MalformedRequest,
    MissingSID,
    NotCoprime,
    RegistrationRefused,
    UnsupportedCombination,
    ZeroNotInvertible,
)
from authlab.protocol import (
    IdPolicy,
    Identity,
    LoginRequest,
    Scheme,
    ServerSecret,
    SystemParams,
)
from authlab.schemes import CardInput, Credential, SmartCard, VerifyResult, make_login, register, verify

__version__ = "0.1.0"

__all__ = [
    "AuthLabError",
    "BadIdentityFormat",
    "CardInput",
    "Credential",
    "DegenerateIdentity",
    "EmptyCoalition",
    "IdPolicy",
    "Identity",
    "LoginRequest",
    "MalformedRequest",
    "MissingSID",
    "NotCoprime",
    "RegistrationRefused",
    "Scheme",
    "ServerSecret",
    "SmartCard",
    "SystemParams",
    "UnsupportedCombination",
    "VerifyResult",
    "ZeroNotInvertible",
    "make_login",
    "register",
    "verify",
]
