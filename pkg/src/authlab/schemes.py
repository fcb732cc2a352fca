"""Registration, card-side login and server-side verification for the four schemes.

All four share one algebra. With base B (ID for Hwang-Li, SID otherwise) and
PW = B^x_s, the card sends C1 = B^r and C2 = B^t * PW^r, so an honest request
satisfies C2 = C1^x_s * B^t with t = f(T xor PW) mod (p-1). The schemes
differ only in what the user keys in, what goes on the wire, and how the
server recovers B.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass

from authlab.errors import BadIdentityFormat, DegenerateIdentity, MissingSID
from authlab.modmath import from_hex, mod_inv, mod_pow, sample_exponent, to_hex
from authlab.protocol import (
    HashId,
    Identity,
    LoginRequest,
    Scheme,
    ServerSecret,
    SystemParams,
    check_freshness,
    check_id_format,
    check_sid_range,
    random_identity,
    red,
    t_exponent,
)

AWASTHI_LAL_FLAW = (
    "Awasthi-Lal login needs C1 = SID^r mod p, but SID is neither stored on "
    "the card nor keyed in by the user (who supplies only ID and PW); the "
    "login phase lacks the information it needs to run."
)


class Verdict(str, enum.Enum):
    ACCEPT = "accept"
    REJECT = "reject"


class Reason(str, enum.Enum):
    OK = "ok"
    BAD_ID_FORMAT = "bad_id_format"
    STALE_TIMESTAMP = "stale_timestamp"
    EQUATION_MISMATCH = "equation_mismatch"


@dataclass(frozen=True)
class VerifyResult:
    verdict: Verdict
    reason: Reason

    @classmethod
    def reject(cls, reason: Reason) -> VerifyResult:
        return cls(Verdict.REJECT, reason)

    @property
    def accepted(self) -> bool:
        return self.verdict is Verdict.ACCEPT

    def to_json(self) -> dict:
        return {"verdict": self.verdict.value, "reason": self.reason.value}


ACCEPTED = VerifyResult(Verdict.ACCEPT, Reason.OK)


@dataclass(frozen=True)
class Credential:
    """What the server hands the user over the secure channel.

    For Awasthi-Lal ``sid`` is always None on the card side: the scheme's
    login phase takes only (ID, PW).
    """

    id: Identity
    sid: int | None
    pw: int

    def to_json(self, scheme: Scheme) -> dict:
        obj = {"scheme": scheme.value, "id": self.id.raw, "pw": to_hex(self.pw)}
        if self.sid is not None:
            obj["sid"] = to_hex(self.sid)
        return obj

    @classmethod
    def from_json(cls, obj: dict, params: SystemParams) -> Credential:
        sid = obj.get("sid")
        return cls(
            id=Identity.parse(obj["id"], params),
            sid=None if sid is None else from_hex(sid),
            pw=from_hex(obj["pw"]),
        )


@dataclass(frozen=True)
class SmartCard:
    """The card holds public parameters only: f (as hash_id) and p."""

    scheme: Scheme
    hash_id: HashId
    p: int


@dataclass(frozen=True)
class CardInput:
    """What the user types at the reader."""

    pw: int
    id: Identity | None = None
    sid: int | None = None


def keyed_input(scheme: Scheme, cred: Credential) -> CardInput:
    """The inputs a user physically keys in for ``scheme``.

    Hwang-Li and Awasthi-Lal: (ID, PW). SLH: (SID, PW). Improved: (SID || ID, PW).
    """
    if scheme is Scheme.SLH:
        return CardInput(pw=cred.pw, sid=cred.sid)
    if scheme is Scheme.IMPROVED:
        return CardInput(pw=cred.pw, id=cred.id, sid=cred.sid)
    return CardInput(pw=cred.pw, id=cred.id)


def register(
    secret: ServerSecret, params: SystemParams, ident: Identity, scheme: Scheme
) -> tuple[Credential, SmartCard]:
    if ident.numeric is None:
        raise BadIdentityFormat(f"identity {ident.raw!r} is not a decimal string")
    if ident.numeric in (0, 1, params.p - 1):
        raise DegenerateIdentity(f"identity {ident.raw!r} reduces to {ident.numeric} mod p")
    if not check_id_format(ident, params):
        raise BadIdentityFormat(f"identity {ident.raw!r} fails the {params.id_policy.value} policy")

    card = SmartCard(scheme, params.hash_id, params.p)
    if scheme is Scheme.HWANG_LI:
        return Credential(ident, None, mod_pow(ident.numeric, secret.x_s, params.p)), card

    sid = red(secret, ident, params)
    pw = mod_pow(sid, secret.x_s, params.p)
    if scheme is Scheme.AWASTHI_LAL:
        return Credential(ident, None, pw), card
    return Credential(ident, sid, pw), card


def make_login(
    card: SmartCard,
    keyed: CardInput,
    t: int,
    rng: random.Random,
    *,
    r: int | None = None,
) -> LoginRequest:
    """Card-side login computation.

    ``r`` forces the nonce and exists for tests only.
    """
    p = card.p
    if card.scheme is Scheme.AWASTHI_LAL:
        # Raised no matter what was keyed in: the scheme's login phase reads
        # only (ID, PW) from the user and the card stores only (f, p).
        raise MissingSID(AWASTHI_LAL_FLAW)

    if card.scheme is Scheme.HWANG_LI:
        if keyed.id is None or keyed.id.numeric is None:
            raise ValueError("Hwang-Li login needs a decimal ID")
        base, claimed = keyed.id.numeric, keyed.id.raw
    else:
        if keyed.sid is None:
            raise MissingSID(f"{card.scheme.value} login needs the shadow identity")
        base = keyed.sid
        if card.scheme is Scheme.SLH:
            claimed = keyed.sid
        else:
            if keyed.id is None:
                raise ValueError("improved login needs SID || ID")
            claimed = keyed.id.raw

    if r is None:
        r = sample_exponent(p, rng)
    c1 = mod_pow(base, r, p)
    m = mod_pow(base, t_exponent(t, keyed.pw, card), p)
    c2 = m * mod_pow(keyed.pw % p, r, p) % p
    return LoginRequest(card.scheme, claimed, c1, c2, t)


def _claimed_format_ok(req: LoginRequest, params: SystemParams) -> bool:
    if req.scheme.sends_sid:
        return isinstance(req.claimed_id, int) and check_sid_range(req.claimed_id, params)
    if not isinstance(req.claimed_id, str):
        return False
    ident = Identity.parse(req.claimed_id, params)
    # degenerate IDs give PW = 1 or +-1 and a trivially forgeable equation
    return check_id_format(ident, params) and ident.numeric not in (0, 1, params.p - 1)


def server_base(secret: ServerSecret, params: SystemParams, req: LoginRequest) -> int:
    """Recover B from the wire: ID itself, the claimed SID, or Red(ID)."""
    if req.scheme is Scheme.HWANG_LI:
        return Identity.parse(req.claimed_id, params).numeric
    if req.scheme is Scheme.SLH:
        # SLH's server cannot re-derive SID: Red maps J -> SID and J is never sent.
        return req.claimed_id
    return red(secret, Identity.parse(req.claimed_id, params), params)


def equation_mul(secret: ServerSecret, params: SystemParams, req: LoginRequest, base: int) -> bool:
    """C2 == C1^x_s * B^t (mod p)."""
    p = params.p
    # C1 = B^r is a unit; C1 = 0 would satisfy this form with C2 = 0
    if not (0 < req.c1 < p and 0 <= req.c2 < p):
        return False
    pw = mod_pow(base, secret.x_s, p)
    texp = t_exponent(req.t, pw, params)
    return req.c2 == mod_pow(req.c1, secret.x_s, p) * mod_pow(base, texp, p) % p


def equation_inv(secret: ServerSecret, params: SystemParams, req: LoginRequest, base: int) -> bool:
    """C2 * (C1^x_s)^-1 == B^t (mod p)."""
    p = params.p
    if not (0 < req.c1 < p and 0 <= req.c2 < p):
        return False
    c1x = mod_pow(req.c1, secret.x_s, p)
    pw = mod_pow(base, secret.x_s, p)
    texp = t_exponent(req.t, pw, params)
    return req.c2 * mod_inv(c1x, p) % p == mod_pow(base, texp, p)


def verify(secret: ServerSecret, params: SystemParams, req: LoginRequest, t_c: int) -> VerifyResult:
    if not _claimed_format_ok(req, params):
        return VerifyResult.reject(Reason.BAD_ID_FORMAT)
    if not check_freshness(req.t, t_c, params):
        return VerifyResult.reject(Reason.STALE_TIMESTAMP)
    base = server_base(secret, params, req)
    if not equation_mul(secret, params, req, base):
        return VerifyResult.reject(Reason.EQUATION_MISMATCH)
    return ACCEPTED


def equation_forms(secret: ServerSecret, params: SystemParams, req: LoginRequest) -> tuple[bool, bool]:
    """(inverse form, multiplication form) verdicts on the equation alone."""
    base = server_base(secret, params, req)
    return equation_inv(secret, params, req, base), equation_mul(secret, params, req, base)


_HONEST_SCHEMES = (Scheme.HWANG_LI, Scheme.SLH, Scheme.IMPROVED)


def random_honest_request(
    secret: ServerSecret, params: SystemParams, rng: random.Random, scheme: Scheme | None = None
) -> LoginRequest:
    """Register a fresh random user and build one honest login for them."""
    scheme = scheme or rng.choice(_HONEST_SCHEMES)
    cred, card = register(secret, params, random_identity(params, rng), scheme)
    t = rng.randint(0, (1 << 40) - 1)
    return make_login(card, keyed_input(scheme, cred), t, rng)


def verify_equation_identity(
    params: SystemParams, secret: ServerSecret, trials: int, rng: random.Random, tamper=None
) -> bool:
    """True iff, on ``trials`` random honest requests, both equation forms accept.

    ``tamper`` optionally rewrites each request first (used to show the
    harness can fail).
    """
    for _ in range(trials):
        req = random_honest_request(secret, params, rng)
        if tamper is not None:
            req = tamper(req)
        inv_ok, mul_ok = equation_forms(secret, params, req)
        if not (inv_ok and mul_ok):
            return False
    return True
