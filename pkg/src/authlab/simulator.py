"""Deterministic actor simulation: user with card, server, eavesdropper, virtual clock.

Time is virtual throughout; nothing here reads the wall clock. Each scenario
runs a single-threaded event loop and returns a Transcript that serializes
to JSON lines, one event per line.
"""

from __future__ import annotations

import enum
import heapq
import itertools
import json
from dataclasses import dataclass, field

from authlab import attacks
from authlab.errors import MissingSID, UnsupportedCombination
from authlab.protocol import (
    LoginRequest,
    Scheme,
    ServerSecret,
    SystemParams,
    random_identity,
    request_to_json,
    substream,
)
from authlab.schemes import VerifyResult, keyed_input, make_login, register, verify

SIM_EPOCH = attacks.ATTACK_EPOCH
DEFAULT_TRANSIT_S = attacks.TRANSIT_S


class EventKind(str, enum.Enum):
    REGISTER = "REGISTER"
    LOGIN_SENT = "LOGIN_SENT"
    LOGIN_VERDICT = "LOGIN_VERDICT"
    LOGIN_ABORTED = "LOGIN_ABORTED"
    EAVESDROP_CAPTURE = "EAVESDROP_CAPTURE"
    REPLAY_SENT = "REPLAY_SENT"


@dataclass
class SimClock:
    now: int
    skew_s: int = 0

    def advance_to(self, t: int) -> None:
        if t < self.now:
            raise ValueError(f"clock cannot go backwards ({self.now} -> {t})")
        self.now = t

    @property
    def card_now(self) -> int:
        """The card reader's view of the time."""
        return self.now + self.skew_s


@dataclass(frozen=True)
class Event:
    seq: int
    time: int
    kind: EventKind
    payload: dict

    def to_json(self) -> dict:
        return {"seq": self.seq, "time": self.time, "kind": self.kind.value, "payload": self.payload}


@dataclass
class Transcript:
    events: list[Event] = field(default_factory=list)

    def append(self, time: int, kind: EventKind, payload: dict) -> Event:
        event = Event(len(self.events), time, kind, payload)
        self.events.append(event)
        return event

    def kinds(self) -> list[EventKind]:
        return [e.kind for e in self.events]

    def last(self, kind: EventKind | None = None) -> Event:
        matching = [e for e in self.events if kind is None or e.kind is kind]
        return matching[-1]

    def to_jsonl(self) -> str:
        return "".join(
            json.dumps(e.to_json(), sort_keys=True, separators=(",", ":")) + "\n" for e in self.events
        )

    @classmethod
    def from_jsonl(cls, text: str) -> Transcript:
        tr = cls()
        for line in text.splitlines():
            obj = json.loads(line)
            tr.events.append(Event(obj["seq"], obj["time"], EventKind(obj["kind"]), obj["payload"]))
        return tr


class Simulation:
    """Event queue ordered by (virtual time, insertion order)."""

    def __init__(self, params: SystemParams, secret: ServerSecret, seed: int, skew_s: int = 0):
        self.params = params
        self.secret = secret
        self.seed = seed
        self.clock = SimClock(SIM_EPOCH, skew_s)
        self.transcript = Transcript()
        self._queue: list = []
        self._order = itertools.count()

    def at(self, time: int, action) -> None:
        heapq.heappush(self._queue, (time, next(self._order), action))

    def emit(self, kind: EventKind, payload: dict) -> Event:
        return self.transcript.append(self.clock.now, kind, payload)

    def run(self) -> Transcript:
        while self._queue:
            time, _, action = heapq.heappop(self._queue)
            self.clock.advance_to(time)
            action()
        return self.transcript

    def register(self, scheme: Scheme, ident, actor: str = "user"):
        cred, card = register(self.secret, self.params, ident, scheme)
        self.emit(
            EventKind.REGISTER,
            {"actor": actor, "scheme": scheme.value, "id": ident.raw, "sid_issued": cred.sid is not None},
        )
        return cred, card

    def send(self, req: LoginRequest, actor: str) -> None:
        self.emit(EventKind.LOGIN_SENT, {"actor": actor, "request": request_to_json(req)})

    def deliver(self, req: LoginRequest, source: str) -> VerifyResult:
        result = verify(self.secret, self.params, req, self.clock.now)
        self.emit(EventKind.LOGIN_VERDICT, {"source": source, **result.to_json()})
        return result


def _honest_login(sim: Simulation, scheme: Scheme, transit_s: int, on_sent=None) -> None:
    """Register a user, then log in now and deliver after ``transit_s``."""
    user_rng = substream(sim.seed, "user")
    cred, card = sim.register(scheme, random_identity(sim.params, substream(sim.seed, "registry")))
    try:
        req = make_login(card, keyed_input(scheme, cred), sim.clock.card_now, user_rng)
    except MissingSID as exc:
        sim.emit(EventKind.LOGIN_ABORTED, {"actor": "user", "error": "MissingSID", "message": str(exc)})
        return
    sim.send(req, "user")
    if on_sent is not None:
        on_sent(req)
    sim.at(sim.clock.now + transit_s, lambda: sim.deliver(req, "user"))


def scenario_legit_session(
    scheme: Scheme,
    params: SystemParams,
    secret: ServerSecret,
    seed: int,
    *,
    transit_s: int = DEFAULT_TRANSIT_S,
    skew_s: int = 0,
) -> Transcript:
    """Register, log in at the card's clock, verify after transit."""
    scheme = Scheme(scheme)
    sim = Simulation(params, secret, seed, skew_s=skew_s)
    sim.at(sim.clock.now, lambda: _honest_login(sim, scheme, transit_s))
    return sim.run()


def scenario_replay(
    scheme: Scheme,
    params: SystemParams,
    secret: ServerSecret,
    delay_s: int,
    seed: int,
    *,
    transit_s: int = DEFAULT_TRANSIT_S,
) -> Transcript:
    """An eavesdropper copies an honest request and replays it ``delay_s`` after T.

    The schemes only check T against a window, so a replay inside the window
    is accepted; nothing in them remembers requests already seen.
    """
    scheme = Scheme(scheme)
    if delay_s < 0:
        raise ValueError("delay_s must be >= 0")
    sim = Simulation(params, secret, seed)

    def capture(req: LoginRequest) -> None:
        sim.emit(EventKind.EAVESDROP_CAPTURE, {"actor": "eavesdropper", "request": request_to_json(req)})

        def replay() -> None:
            sim.emit(EventKind.REPLAY_SENT, {"actor": "eavesdropper", "request": request_to_json(req)})
            sim.deliver(req, "replay")

        sim.at(req.t + delay_s, replay)

    sim.at(sim.clock.now, lambda: _honest_login(sim, scheme, transit_s, on_sent=capture))
    return sim.run()


def scenario_awasthi_lal_flaw(params: SystemParams, secret: ServerSecret, seed: int) -> Transcript:
    """Registration works; the card then cannot produce C1 without SID."""
    sim = Simulation(params, secret, seed)
    sim.at(sim.clock.now, lambda: _honest_login(sim, Scheme.AWASTHI_LAL, DEFAULT_TRANSIT_S))
    return sim.run()


def scenario_forgery(
    attack: attacks.Attack, scheme: Scheme, params: SystemParams, secret: ServerSecret, seed: int
) -> Transcript:
    """One attack attempt, drawn from the same stream as the matrix cell's first trial."""
    attack, scheme = attacks.Attack(attack), Scheme(scheme)
    if scheme is Scheme.AWASTHI_LAL:
        raise UnsupportedCombination("awasthi-lal logins cannot be built, forged or otherwise")
    sim = Simulation(params, secret, seed)
    result = attacks.attempt(attack, scheme, params, secret, attacks.cell_rng(seed, attack, scheme))

    def play() -> None:
        for raw in result.registered:
            sim.emit(
                EventKind.REGISTER,
                {"actor": "population", "scheme": scheme.value, "id": raw, "sid_issued": scheme.uses_red},
            )
        if result.request is None:
            sim.emit(EventKind.LOGIN_ABORTED, {"actor": "attacker", "error": "AttackAborted", "message": result.note})
            return
        sim.send(result.request, "attacker")
        sim.at(sim.clock.now + attacks.TRANSIT_S, lambda: sim.deliver(result.request, "attacker"))

    sim.at(attacks.ATTACK_EPOCH, play)
    return sim.run()
