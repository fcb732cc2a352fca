"""Published forgery and masquerade attacks, and the attack x scheme matrix.

Every forgery here rides on one homomorphism: PW = B^x_s, so for any k,
(B^k)^x_s = PW^k and (B1*B2)^x_s = PW1*PW2. Anyone holding one valid
(B, PW) pair can mint more without knowing x_s. Schemes that let the
attacker choose B on the wire (Hwang-Li sends ID, SLH sends SID) fall to it.
The improved scheme recomputes B = Red(ID) with a server-held key, so a
forged SID is useless unless the attacker also finds an ID that Red maps
onto it.
"""

from __future__ import annotations

import enum
import json
import random
from collections import Counter
from dataclasses import dataclass
from math import gcd

from authlab.errors import (
    AuthLabError,
    EmptyCoalition,
    MissingSID,
    RegistrationRefused,
    UnsupportedCombination,
)
from authlab.modmath import exp_inv, mod_pow
from authlab.protocol import (
    IdPolicy,
    Identity,
    LoginRequest,
    Scheme,
    ServerSecret,
    SystemParams,
    random_identity,
    substream,
)
from authlab.schemes import (
    CardInput,
    Credential,
    SmartCard,
    VerifyResult,
    make_login,
    register,
    verify,
)

ATTACK_EPOCH = 1_700_000_000
TRANSIT_S = 1
COALITION_SIZE = 3
DEFAULT_TRIALS = 1000


class Attack(str, enum.Enum):
    CHAN_CHENG = "chan_cheng"
    CHANG_HWANG = "chang_hwang"
    GROUP_FORGE = "group_forge"
    SLH_MASQUERADE = "slh_masquerade"
    LEUNG = "leung"


MATRIX_SCHEMES = (Scheme.HWANG_LI, Scheme.SLH, Scheme.IMPROVED)


@dataclass(frozen=True)
class ForgedPair:
    claimed: int
    pw: int
    provenance: Attack


@dataclass(frozen=True)
class AttackOutcome:
    attack: Attack
    scheme: Scheme
    succeeded: bool
    detail: str
    attempts: int = 0
    accepts: int = 0

    def to_json(self) -> dict:
        return {
            "attack": self.attack.value,
            "scheme": self.scheme.value,
            "succeeded": self.succeeded,
            "detail": self.detail,
            "attempts": self.attempts,
            "accepts": self.accepts,
        }


def chan_cheng_forge(id_a: int, pw_a: int, p: int) -> ForgedPair:
    """Square a valid pair: (ID_A^2, PW_A^2)."""
    return ForgedPair(id_a * id_a % p, pw_a * pw_a % p, Attack.CHAN_CHENG)


def chang_hwang_forge(id_a: int, pw_a: int, k: int, p: int) -> ForgedPair:
    """Raise a valid pair to any power k: (ID_A^k, PW_A^k)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return ForgedPair(mod_pow(id_a, k, p), mod_pow(pw_a, k, p), Attack.CHANG_HWANG)


def group_forge(pairs, p: int) -> ForgedPair:
    """A coalition multiplies its pairs together."""
    pairs = list(pairs)
    if not pairs:
        raise EmptyCoalition("a coalition needs at least one member")
    claimed, pw = 1, 1
    for id_j, pw_j in pairs:
        claimed = claimed * id_j % p
        pw = pw * pw_j % p
    return ForgedPair(claimed, pw, Attack.GROUP_FORGE)


def leung_forge(sid_a: int, pw_a: int, k: int, p: int) -> ForgedPair:
    """Chang-Hwang's power forgery applied to a shadow identity."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return ForgedPair(mod_pow(sid_a, k, p), mod_pow(pw_a, k, p), Attack.LEUNG)


def registration_oracle(secret: ServerSecret, params: SystemParams, scheme: Scheme):
    """A handle on the server's registration desk, as any user would have."""

    def oracle(ident: Identity) -> Credential:
        try:
            return register(secret, params, ident, scheme)[0]
        except AuthLabError as exc:
            raise RegistrationRefused(f"{ident.raw!r}: {exc}") from exc

    return oracle


def slh_masquerade(id_a: Identity, k: int, reg_oracle, params: SystemParams) -> int:
    """Recover a victim's password by registering ID_A^k.

    The server issues PW_B = ID_A^(k*x_s); taking the k-th root, i.e. raising
    to k^-1 mod (p-1), gives ID_A^x_s. This needs gcd(k, p-1) = 1; the
    condition gcd(k, p) = 1 sometimes quoted for this attack is vacuous for a
    prime p and does not make k invertible.
    """
    p = params.p
    k_inv = exp_inv(k, p - 1)
    id_b = Identity.from_numeric(mod_pow(id_a.numeric, k, p), params)
    cred_b = reg_oracle(id_b)
    return mod_pow(cred_b.pw, k_inv, p)


@dataclass(frozen=True)
class Attempt:
    """One forged login and how the server answered it."""

    attack: Attack
    scheme: Scheme
    forged: ForgedPair | None
    request: LoginRequest | None
    result: VerifyResult | None
    note: str = ""
    registered: tuple[str, ...] = ()

    @property
    def accepted(self) -> bool:
        return self.result is not None and self.result.accepted


def _base(scheme: Scheme, cred: Credential) -> int:
    return cred.id.numeric if scheme is Scheme.HWANG_LI else cred.sid


def _enroll(secret, params, scheme, rng, log: list) -> Credential:
    ident = random_identity(params, rng)
    log.append(ident.raw)
    return register(secret, params, ident, scheme)[0]


def _random_k(p: int, rng: random.Random, coprime: bool = False) -> int:
    while True:
        k = rng.randint(2, p - 2)
        if not coprime or gcd(k, p - 1) == 1:
            return k


def _forge(attack: Attack, scheme, secret, params, rng, log) -> tuple[ForgedPair, Credential]:
    p = params.p
    victim = _enroll(secret, params, scheme, rng, log)
    base, pw = _base(scheme, victim), victim.pw
    if attack is Attack.CHAN_CHENG:
        return chan_cheng_forge(base, pw, p), victim
    if attack is Attack.CHANG_HWANG:
        return chang_hwang_forge(base, pw, _random_k(p, rng), p), victim
    if attack is Attack.LEUNG:
        return leung_forge(base, pw, _random_k(p, rng), p), victim
    members = [victim] + [_enroll(secret, params, scheme, rng, log) for _ in range(COALITION_SIZE - 1)]
    return group_forge([(_base(scheme, m), m.pw) for m in members], p), victim


def _forged_input(scheme: Scheme, forged: ForgedPair, params, rng, avoid: Identity) -> CardInput:
    if scheme is Scheme.HWANG_LI:
        return CardInput(pw=forged.pw, id=Identity.from_numeric(forged.claimed, params))
    if scheme is Scheme.SLH:
        return CardInput(pw=forged.pw, sid=forged.claimed)
    # Improved: the server will compute Red(ID), so the attacker must also
    # name an ID. Lacking the Red key, all they can do is guess.
    guess = random_identity(params, rng)
    while guess.raw == avoid.raw:
        guess = random_identity(params, rng)
    return CardInput(pw=forged.pw, id=guess, sid=forged.claimed)


def _masquerade(scheme, secret, params, rng, log) -> tuple[ForgedPair | None, CardInput | None, str]:
    p = params.p
    victim = _enroll(secret, params, scheme, rng, log)
    k = _random_k(p, rng, coprime=True)
    issued = []
    oracle = registration_oracle(secret, params, scheme)

    def recording_oracle(ident):
        log.append(ident.raw)
        cred = oracle(ident)
        issued.append(cred)
        return cred

    try:
        recovered = slh_masquerade(victim.id, k, recording_oracle, params)
    except RegistrationRefused as exc:
        return None, None, f"registration refused: {exc}"
    if scheme is Scheme.HWANG_LI:
        keyed = CardInput(pw=recovered, id=victim.id)
        claimed = victim.id.numeric
    elif scheme is Scheme.SLH:
        # the victim's SID travels in clear on every SLH login
        keyed = CardInput(pw=recovered, sid=victim.sid)
        claimed = victim.sid
    else:
        # SID_A never leaves the victim; the best guess is the k-th root of SID_B
        claimed = mod_pow(issued[0].sid, exp_inv(k, p - 1), p)
        keyed = CardInput(pw=recovered, id=victim.id, sid=claimed)
    return ForgedPair(claimed, recovered, Attack.SLH_MASQUERADE), keyed, ""


def attempt(
    attack: Attack, scheme: Scheme, params: SystemParams, secret: ServerSecret, rng: random.Random
) -> Attempt:
    """Mount one attack against a freshly registered victim.

    Forged material is fed through the ordinary card login, with an honest
    timestamp, so the only thing under test is the algebra.
    """
    attack, scheme = Attack(attack), Scheme(scheme)
    if scheme is Scheme.AWASTHI_LAL:
        raise UnsupportedCombination(
            "awasthi-lal issues no card-side SID and its login phase cannot run"
        )
    log: list[str] = []
    if attack is Attack.SLH_MASQUERADE:
        forged, keyed, note = _masquerade(scheme, secret, params, rng, log)
        if keyed is None:
            return Attempt(attack, scheme, None, None, None, note, tuple(log))
    else:
        forged, victim = _forge(attack, scheme, secret, params, rng, log)
        keyed = _forged_input(scheme, forged, params, rng, avoid=victim.id)
        note = ""
    card = SmartCard(scheme, params.hash_id, params.p)
    try:
        req = make_login(card, keyed, ATTACK_EPOCH, rng)
    except (MissingSID, ValueError) as exc:
        return Attempt(attack, scheme, forged, None, None, f"login not built: {exc}", tuple(log))
    result = verify(secret, params, req, ATTACK_EPOCH + TRANSIT_S)
    return Attempt(attack, scheme, forged, req, result, note, tuple(log))


def cell_rng(seed: int, attack: Attack, scheme: Scheme) -> random.Random:
    return substream(seed, f"attack/{Attack(attack).value}/{Scheme(scheme).value}")


def run_cell(
    attack: Attack, scheme: Scheme, params: SystemParams, secret: ServerSecret, trials: int, seed: int
) -> AttackOutcome:
    attack, scheme = Attack(attack), Scheme(scheme)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = cell_rng(seed, attack, scheme)
    try:
        attempts = [attempt(attack, scheme, params, secret, rng) for _ in range(trials)]
    except UnsupportedCombination as exc:
        return AttackOutcome(attack, scheme, False, str(exc), 0, 0)
    accepts = sum(a.accepted for a in attempts)
    rejects = Counter(
        a.result.reason.value if a.result is not None else a.note.split(":")[0].replace(" ", "_")
        for a in attempts
        if not a.accepted
    )
    detail = f"accepted {accepts}/{trials}"
    if rejects:
        detail += "; rejected: " + ", ".join(f"{k}={v}" for k, v in sorted(rejects.items()))
    return AttackOutcome(attack, scheme, accepts > 0, detail, trials, accepts)


def run_attack_matrix(
    params: SystemParams,
    secret: ServerSecret,
    schemes=MATRIX_SCHEMES,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    attacks=tuple(Attack),
) -> list[AttackOutcome]:
    """Run every attack against every scheme; one independent RNG stream per cell."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    return [run_cell(a, s, params, secret, trials, seed) for a in attacks for s in schemes]


def expected_success(attack: Attack, scheme: Scheme, policy: IdPolicy) -> bool | None:
    """The verdict the literature predicts for a cell, or None if it is policy-dependent.

    Under the strict 12-digit Luhn policy, forged Hwang-Li identities only
    occasionally survive the format check, so those cells are reported but
    not pinned.
    """
    attack, scheme = Attack(attack), Scheme(scheme)
    if scheme is Scheme.HWANG_LI:
        return None if policy is IdPolicy.STRICT else True
    if scheme is Scheme.SLH:
        # Red blocks registration-based masquerade; the forgeries all work on SIDs
        return attack is not Attack.SLH_MASQUERADE
    return False


def matrix_matches_expected(outcomes, policy: IdPolicy) -> bool:
    for o in outcomes:
        want = expected_success(o.attack, o.scheme, policy)
        if want is not None and o.succeeded != want:
            return False
    return True


def matrix_to_json(outcomes) -> str:
    return json.dumps([o.to_json() for o in outcomes], sort_keys=True, indent=2) + "\n"


def matrix_to_table(outcomes) -> str:
    schemes = list(dict.fromkeys(o.scheme for o in outcomes))
    attacks = list(dict.fromkeys(o.attack for o in outcomes))
    cells = {(o.attack, o.scheme): o for o in outcomes}

    def render(o):
        if o is None:
            return "-"
        word = "BROKEN" if o.succeeded else "holds"
        return f"{word} ({o.accepts}/{o.attempts})"

    header = ["attack"] + [s.value for s in schemes]
    rows = [[a.value] + [render(cells.get((a, s))) for s in schemes] for a in attacks]
    widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in [header] + rows]
    return "\n".join(lines) + "\n"
