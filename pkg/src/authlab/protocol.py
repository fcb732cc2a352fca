"""Shared protocol vocabulary: parameters, identities, f, Red and the wire format."""

from __future__ import annotations

import enum
import hashlib
import hmac
import json
import random
from dataclasses import dataclass, field

from authlab.errors import BadIdentityFormat, MalformedRequest
from authlab.modmath import check_prime, from_hex, to_hex

DEFAULT_DELTA_T = 60
STRICT_ID_DIGITS = 12
MIN_RED_KEY_BYTES = 16
MAX_TIMESTAMP = (1 << 64) - 1


class HashId(str, enum.Enum):
    SHA2_256 = "sha2-256"


class IdPolicy(str, enum.Enum):
    STRICT = "strict"
    PERMISSIVE = "permissive"


class Scheme(str, enum.Enum):
    HWANG_LI = "hwang-li"
    SLH = "slh"
    AWASTHI_LAL = "awasthi-lal"
    IMPROVED = "improved"

    @property
    def uses_red(self) -> bool:
        return self is not Scheme.HWANG_LI

    @property
    def sends_sid(self) -> bool:
        """SLH puts the shadow identity on the wire; the others send ID."""
        return self is Scheme.SLH


_HASHES = {HashId.SHA2_256: hashlib.sha256}


def substream(seed: int, label: str) -> random.Random:
    """Independent, reproducible RNG stream for one named actor."""
    return random.Random(f"authlab/{seed}/{label}")


@dataclass(frozen=True)
class SystemParams:
    p: int
    hash_id: HashId = HashId.SHA2_256
    delta_t: int = DEFAULT_DELTA_T
    id_policy: IdPolicy = IdPolicy.PERMISSIVE

    def __post_init__(self):
        check_prime(self.p)
        if self.delta_t <= 0:
            raise ValueError("delta_t must be positive")
        object.__setattr__(self, "hash_id", HashId(self.hash_id))
        object.__setattr__(self, "id_policy", IdPolicy(self.id_policy))

    @property
    def byte_width(self) -> int:
        return (self.p.bit_length() + 7) // 8

    def to_json(self) -> dict:
        return {
            "p": to_hex(self.p),
            "hash": self.hash_id.value,
            "delta_t_s": self.delta_t,
            "id_policy": self.id_policy.value,
        }

    @classmethod
    def from_json(cls, obj: dict) -> SystemParams:
        try:
            return cls(
                p=from_hex(obj["p"]),
                hash_id=HashId(obj.get("hash", HashId.SHA2_256.value)),
                delta_t=int(obj.get("delta_t_s", DEFAULT_DELTA_T)),
                id_policy=IdPolicy(obj.get("id_policy", IdPolicy.PERMISSIVE.value)),
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"bad config: {exc}") from exc


@dataclass(frozen=True)
class ServerSecret:
    """The server's exponent x_s and the key behind Red(.).

    ``red_key`` is excluded from repr so it cannot leak into logs.
    """

    x_s: int
    red_key: bytes = field(repr=False)

    def __post_init__(self):
        if len(self.red_key) < MIN_RED_KEY_BYTES:
            raise ValueError(f"red_key must be at least {MIN_RED_KEY_BYTES} bytes")

    def check(self, params: SystemParams) -> None:
        if not 2 <= self.x_s <= params.p - 2:
            raise ValueError("x_s must lie in [2, p-2]")

    @classmethod
    def generate(cls, params: SystemParams, rng: random.Random) -> ServerSecret:
        return cls(x_s=rng.randint(2, params.p - 2), red_key=rng.randbytes(32))

    def to_json(self) -> dict:
        return {"x_s": to_hex(self.x_s), "red_key": self.red_key.hex()}

    @classmethod
    def from_json(cls, obj: dict) -> ServerSecret:
        try:
            return cls(x_s=from_hex(obj["x_s"]), red_key=bytes.fromhex(obj["red_key"]))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"bad secret file: {exc}") from exc


@dataclass(frozen=True)
class Identity:
    """A user identity string and its integer reading mod p.

    ``numeric`` is None when ``raw`` is not a decimal string.
    """

    raw: str
    numeric: int | None

    @classmethod
    def parse(cls, raw: str, params: SystemParams) -> Identity:
        numeric = int(raw) % params.p if _is_decimal(raw) else None
        return cls(raw, numeric)

    @classmethod
    def from_numeric(cls, n: int, params: SystemParams) -> Identity:
        """Render a residue as an identity string, zero-padded under STRICT."""
        raw = str(n)
        if params.id_policy is IdPolicy.STRICT and len(raw) < STRICT_ID_DIGITS:
            raw = raw.zfill(STRICT_ID_DIGITS)
        return cls.parse(raw, params)


def _is_decimal(s: str) -> bool:
    return bool(s) and all("0" <= c <= "9" for c in s)


def luhn_valid(digits: str) -> bool:
    if not _is_decimal(digits):
        return False
    total = 0
    for i, c in enumerate(reversed(digits)):
        d = ord(c) - 48
        if i % 2 == 1:
            d *= 2
            if d > 9:
                d -= 9
        total += d
    return total % 10 == 0


def luhn_check_digit(payload: str) -> str:
    for d in "0123456789":
        if luhn_valid(payload + d):
            return d
    raise AssertionError("unreachable")


def random_identity(params: SystemParams, rng: random.Random) -> Identity:
    """A format-valid identity, not degenerate, drawn from ``rng``."""
    while True:
        if params.id_policy is IdPolicy.STRICT:
            body = str(rng.randint(10 ** (STRICT_ID_DIGITS - 2), 10 ** (STRICT_ID_DIGITS - 1) - 1))
            ident = Identity.parse(body + luhn_check_digit(body), params)
        else:
            ident = Identity.parse(str(rng.randint(2, params.p - 2)), params)
        if ident.numeric not in (0, 1, params.p - 1):
            return ident


def check_id_format(ident: Identity, params: SystemParams) -> bool:
    if params.id_policy is IdPolicy.STRICT:
        return len(ident.raw) == STRICT_ID_DIGITS and luhn_valid(ident.raw)
    return ident.numeric is not None and 2 <= ident.numeric <= params.p - 2


def check_sid_range(sid: int, params: SystemParams) -> bool:
    """Shadow identities are bare residues; their only format is Red's range."""
    return 2 <= sid <= params.p - 2


def check_freshness(t: int, t_c: int, params: SystemParams) -> bool:
    """Accept iff 0 <= t_c - t <= delta_t. Future-dated requests are refused."""
    return 0 <= t_c - t <= params.delta_t


def t_exponent(t: int, pw: int, params) -> int:
    """f(T xor PW) mod (p-1).

    PW is laid out big-endian over ceil(bitlen(p)/8) bytes. T is taken as 8
    big-endian bytes occupying the low end of that buffer: zero-padded when
    the buffer is wider, truncated to its low bytes when narrower.

    ``params`` only needs ``p`` and ``hash_id``, so a SmartCard works too.
    """
    p = params.p
    if not 0 <= pw < p:
        raise ValueError("pw must lie in [0, p-1]")
    width = (p.bit_length() + 7) // 8
    pw_bytes = pw.to_bytes(width, "big")
    t_bytes = t.to_bytes(8, "big")
    t_bytes = t_bytes.rjust(width, b"\0") if width >= 8 else t_bytes[-width:]
    mixed = bytes(a ^ b for a, b in zip(pw_bytes, t_bytes))
    digest = _HASHES[HashId(params.hash_id)](mixed).digest()
    return int.from_bytes(digest, "big") % (p - 1)


def red(secret: ServerSecret, ident: Identity, params: SystemParams) -> int:
    """Shadow identity SID = Red(ID): HMAC-SHA256 under the server key, mapped into [2, p-2]."""
    if not check_id_format(ident, params):
        raise BadIdentityFormat(f"identity {ident.raw!r} fails the {params.id_policy.value} policy")
    mac = hmac.new(secret.red_key, ident.raw.encode("ascii"), hashlib.sha256).digest()
    return int.from_bytes(mac, "big") % (params.p - 3) + 2


@dataclass(frozen=True)
class LoginRequest:
    """Wire message (claimed identifier, C1, C2, T).

    ``claimed_id`` is the raw ID string for every scheme except SLH, where it
    is the shadow identity as an int.
    """

    scheme: Scheme
    claimed_id: str | int
    c1: int
    c2: int
    t: int


_REQUEST_KEYS = {"scheme", "id", "c1", "c2", "t"}


def _canonical(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True).encode("ascii")


def request_to_json(req: LoginRequest) -> dict:
    claimed = to_hex(req.claimed_id) if req.scheme.sends_sid else req.claimed_id
    return {
        "scheme": req.scheme.value,
        "id": claimed,
        "c1": to_hex(req.c1),
        "c2": to_hex(req.c2),
        "t": to_hex(req.t),
    }


def serialize_request(req: LoginRequest) -> bytes:
    return _canonical(request_to_json(req))


def request_from_json(obj) -> LoginRequest:
    if not isinstance(obj, dict) or set(obj) != _REQUEST_KEYS:
        raise MalformedRequest(f"expected an object with keys {sorted(_REQUEST_KEYS)}")
    try:
        scheme = Scheme(obj["scheme"])
        if not isinstance(obj["id"], str):
            raise TypeError("id must be a string")
        claimed = from_hex(obj["id"]) if scheme.sends_sid else obj["id"]
        t = from_hex(obj["t"])
        req = LoginRequest(scheme, claimed, from_hex(obj["c1"]), from_hex(obj["c2"]), t)
    except (TypeError, ValueError) as exc:
        raise MalformedRequest(str(exc)) from exc
    if t > MAX_TIMESTAMP:
        raise MalformedRequest("timestamp exceeds 64 bits")
    return req


def deserialize_request(data: bytes) -> LoginRequest:
    try:
        obj = json.loads(data)
    except (ValueError, UnicodeDecodeError) as exc:
        raise MalformedRequest(f"not JSON: {exc}") from exc
    return request_from_json(obj)
