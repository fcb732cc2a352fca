"""authlab command line.

Exit codes: 0 success/ACCEPT, 2 usage or malformed input, 3 REJECT,
4 scheme flaw (Awasthi-Lal login), 5 attack matrix deviates from expectation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from authlab import attacks, simulator
from authlab.errors import AuthLabError, MalformedRequest, MissingSID
from authlab.modmath import gen_prime
from authlab.protocol import (
    IdPolicy,
    Identity,
    Scheme,
    ServerSecret,
    SystemParams,
    deserialize_request,
    serialize_request,
    substream,
)
from authlab.schemes import Credential, SmartCard, keyed_input, make_login, register, verify

DEFAULT_SEED = 20040501
DEFAULT_BITS = 64

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_REJECT = 3
EXIT_FLAW = 4
EXIT_MATRIX = 5

SECRET_WARNING = (
    "WARNING: this file holds the server exponent and the Red key in plain text. "
    "Demo use only."
)


class UsageError(Exception):
    pass


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("AUTHLAB_SEED")
    if env is not None:
        try:
            return int(env, 0)
        except ValueError:
            raise UsageError(f"AUTHLAB_SEED is not an integer: {env!r}")
    return DEFAULT_SEED


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read {path}: {exc}")


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def demo_setup(seed: int, bits: int = DEFAULT_BITS, policy: IdPolicy = IdPolicy.PERMISSIVE):
    """Parameters and secret derived from the seed alone."""
    params = SystemParams(gen_prime(bits, substream(seed, "params")), id_policy=policy)
    return params, ServerSecret.generate(params, substream(seed, "secret"))


def _load_params(args) -> SystemParams:
    try:
        return SystemParams.from_json(_read_json(args.config))
    except ValueError as exc:
        raise UsageError(str(exc))


def _load_secret(args, params: SystemParams) -> ServerSecret:
    try:
        secret = ServerSecret.from_json(_read_json(args.secret))
        secret.check(params)
    except ValueError as exc:
        raise UsageError(str(exc))
    return secret


def _setup(args):
    """Config and secret from files when given, otherwise from the seed."""
    if args.config is None:
        if args.secret is not None:
            raise UsageError("--secret needs --config")
        return demo_setup(_seed(args))
    params = _load_params(args)
    if args.secret is None:
        raise UsageError("--config needs --secret")
    return params, _load_secret(args, params)


def cmd_keygen(args) -> int:
    if args.bits < 16:
        raise UsageError("--bits must be >= 16")
    seed = _seed(args)
    policy = IdPolicy(args.id_policy)
    params = SystemParams(gen_prime(args.bits, substream(seed, "params")), delta_t=args.delta_t, id_policy=policy)
    secret = ServerSecret.generate(params, substream(seed, "secret"))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "params.json").write_text(_dump(params.to_json()))
    (out / "secret.json").write_text(_dump({"warning": SECRET_WARNING, **secret.to_json()}))
    print(f"wrote {out / 'params.json'} and {out / 'secret.json'} ({params.p.bit_length()}-bit p)")
    return EXIT_OK


def cmd_register(args) -> int:
    params = _load_params(args)
    secret = _load_secret(args, params)
    scheme = Scheme(args.scheme)
    try:
        cred, _ = register(secret, params, Identity.parse(args.id, params), scheme)
    except AuthLabError as exc:
        print(f"registration refused: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _write(_dump(cred.to_json(scheme)), args.out)
    return EXIT_OK


def cmd_login(args) -> int:
    params = _load_params(args)
    cred_obj = _read_json(args.credential)
    scheme = Scheme(args.scheme or cred_obj.get("scheme"))
    try:
        cred = Credential.from_json(cred_obj, params)
    except (KeyError, ValueError) as exc:
        raise UsageError(f"bad credential file: {exc}")
    card = SmartCard(scheme, params.hash_id, params.p)
    t = args.time if args.time is not None else int(time.time())
    try:
        req = make_login(card, keyed_input(scheme, cred), t, substream(_seed(args), "user"))
    except MissingSID as exc:
        print(f"MissingSID: {exc}", file=sys.stderr)
        return EXIT_FLAW
    except ValueError as exc:
        raise UsageError(str(exc))
    _write(serialize_request(req).decode() + "\n", args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    params = _load_params(args)
    secret = _load_secret(args, params)
    try:
        req = deserialize_request(Path(args.request).read_bytes())
    except OSError as exc:
        raise UsageError(f"cannot read {args.request}: {exc}")
    except MalformedRequest as exc:
        raise UsageError(f"malformed request: {exc}")
    now = args.now if args.now is not None else int(time.time())
    result = verify(secret, params, req, now)
    print(json.dumps(result.to_json(), sort_keys=True))
    return EXIT_OK if result.accepted else EXIT_REJECT


def cmd_attack_matrix(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    params, secret = _setup(args)
    outcomes = attacks.run_attack_matrix(params, secret, trials=args.trials, seed=_seed(args))
    if args.output == "json":
        sys.stdout.write(attacks.matrix_to_json(outcomes))
    else:
        sys.stdout.write(attacks.matrix_to_table(outcomes))
    if not attacks.matrix_matches_expected(outcomes, params.id_policy):
        print("attack matrix deviates from the expected pattern", file=sys.stderr)
        return EXIT_MATRIX
    return EXIT_OK


def cmd_scenario(args) -> int:
    params, secret = _setup(args)
    seed = _seed(args)
    name = args.name
    try:
        if name == "legit":
            tr = simulator.scenario_legit_session(args.scheme, params, secret, seed, skew_s=args.skew)
        elif name == "replay":
            tr = simulator.scenario_replay(args.scheme, params, secret, args.delay, seed)
        elif name == "awasthi-lal-flaw":
            tr = simulator.scenario_awasthi_lal_flaw(params, secret, seed)
        else:
            if args.attack is None:
                raise UsageError("forgery scenario needs --attack")
            tr = simulator.scenario_forgery(args.attack, args.scheme, params, secret, seed)
    except AuthLabError as exc:
        raise UsageError(str(exc))
    _write(tr.to_jsonl(), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="authlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    schemes = [s.value for s in Scheme]

    def common(p, config=True, secret=True):
        p.add_argument("--seed", type=lambda s: int(s, 0), default=None, help="RNG seed (env AUTHLAB_SEED)")
        if config:
            p.add_argument("--config", help="params JSON written by keygen")
        if secret:
            p.add_argument("--secret", help="secret JSON written by keygen")

    p = sub.add_parser("keygen", help="generate public params and a server secret")
    common(p, config=False, secret=False)
    p.add_argument("--bits", type=int, default=DEFAULT_BITS)
    p.add_argument("--delta-t", type=int, default=60, help="freshness window in seconds")
    p.add_argument("--id-policy", choices=[x.value for x in IdPolicy], default="permissive")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("register", help="issue a credential")
    common(p)
    p.add_argument("--scheme", choices=schemes, required=True)
    p.add_argument("--id", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_register, needs=("config", "secret"))

    p = sub.add_parser("login", help="build a login request from a credential")
    common(p, secret=False)
    p.add_argument("--scheme", choices=schemes)
    p.add_argument("--credential", required=True)
    p.add_argument("--time", type=int, help="card timestamp (default: wall clock)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_login, needs=("config",))

    p = sub.add_parser("verify", help="check a login request")
    common(p)
    p.add_argument("--request", required=True)
    p.add_argument("--now", type=int, help="server receipt time (default: wall clock)")
    p.set_defaults(func=cmd_verify, needs=("config", "secret"))

    p = sub.add_parser("matrix", aliases=["attack-matrix"], help="run every attack against every scheme")
    common(p)
    p.add_argument("--trials", type=int, default=attacks.DEFAULT_TRIALS)
    p.add_argument("--output", choices=["json", "table"], default="table")
    p.set_defaults(func=cmd_attack_matrix)

    p = sub.add_parser("scenario", help="run a simulated scenario and print its transcript")
    common(p)
    p.add_argument("name", choices=["legit", "replay", "awasthi-lal-flaw", "forgery"])
    p.add_argument("--scheme", choices=schemes, default=Scheme.IMPROVED.value)
    p.add_argument("--attack", choices=[a.value for a in attacks.Attack])
    p.add_argument("--delay", type=int, default=0, help="replay delay in seconds")
    p.add_argument("--skew", type=int, default=0, help="card clock skew in seconds")
    p.add_argument("--out")
    p.set_defaults(func=cmd_scenario)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name in getattr(args, "needs", ()):
        if getattr(args, name) is None:
            parser.error(f"--{name} is required for {args.command}")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"authlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
