import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from authlab.errors import BadIdentityFormat, MalformedRequest
from authlab.modmath import gen_prime
from authlab.protocol import (
    IdPolicy,
    Identity,
    LoginRequest,
    Scheme,
    ServerSecret,
    SystemParams,
    check_freshness,
    check_id_format,
    deserialize_request,
    luhn_check_digit,
    random_identity,
    red,
    serialize_request,
    t_exponent,
)
from oracles import luhn_by_doubling, reference_t_exponent


def test_params_validation():
    with pytest.raises(ValueError):
        SystemParams(19)
    with pytest.raises(ValueError):
        SystemParams(25)
    with pytest.raises(ValueError):
        SystemParams(23, delta_t=0)


def test_params_config_round_trip(p64):
    obj = p64.to_json()
    assert set(obj) == {"p", "hash", "delta_t_s", "id_policy"}
    assert obj["hash"] == "sha2-256"
    assert SystemParams.from_json(obj) == p64


def test_secret_hides_key_in_repr():
    s = ServerSecret(5, b"k" * 16)
    assert "k" * 16 not in repr(s) and "6b6b" not in repr(s)
    with pytest.raises(ValueError):
        ServerSecret(5, b"short")


class TestTExponent:
    def test_zero_inputs_at_p23(self, p23):
        # sha256(b"\x00") mod 22, layout traced by hand: one zero byte
        assert t_exponent(0, 0, p23) == 19

    def test_frozen_small_value(self, p23):
        # low byte of 1000 is 0xe8; xor 17 -> 0xf9
        assert t_exponent(1000, 17, p23) == 10

    def test_deterministic_and_bounded(self, p23, p64):
        rng = random.Random(3)
        for params in (p23, p64):
            for _ in range(500):
                t, pw = rng.getrandbits(40), rng.randrange(params.p)
                v = t_exponent(t, pw, params)
                assert v == t_exponent(t, pw, params)
                assert 0 <= v < params.p - 1

    @pytest.mark.parametrize("bits", [5, 12, 64, 72, 256])
    def test_matches_reference_layout(self, bits):
        params = SystemParams(gen_prime(max(bits, 5), random.Random(bits)) if bits > 5 else 23)
        rng = random.Random(bits)
        for _ in range(200):
            t, pw = rng.getrandbits(64), rng.randrange(params.p)
            assert t_exponent(t, pw, params) == reference_t_exponent(t, pw, params.p)

    def test_single_bit_flips_change_output(self, p64):
        rng = random.Random(11)
        changed = 0
        for _ in range(1000):
            # keep pw below 2**62 so any flip of bits 0..62 stays under p
            t, pw = rng.getrandbits(63), rng.getrandbits(62)
            base = t_exponent(t, pw, p64)
            if rng.random() < 0.5:
                t2, pw2 = t ^ (1 << rng.randrange(63)), pw
            else:
                pw2 = pw ^ (1 << rng.randrange(63))
                t2 = t
            changed += t_exponent(t2, pw2, p64) != base
        assert changed / 1000 >= 0.99


class TestRed:
    def test_deterministic(self, p64, secret64):
        ident = Identity.parse("123456789", p64)
        assert red(secret64, ident, p64) == red(secret64, ident, p64)

    def test_range(self, p23, secret23):
        rng = random.Random(0)
        for _ in range(10_000):
            sid = red(secret23, random_identity(p23, rng), p23)
            assert 2 <= sid <= 21

    def test_distinct_keys_give_distinct_sids(self, p64):
        rng = random.Random(1)
        distinct = 0
        for _ in range(10_000):
            k1, k2 = rng.randbytes(16), rng.randbytes(16)
            ident = random_identity(p64, rng)
            distinct += red(ServerSecret(2, k1), ident, p64) != red(ServerSecret(2, k2), ident, p64)
        assert distinct >= 9990

    def test_no_collisions_over_many_ids(self, p64, secret64):
        ids = {str(n) for n in random.Random(2).sample(range(2, 10**15), 10_000)}
        sids = {red(secret64, Identity.parse(i, p64), p64) for i in ids}
        assert len(sids) == len(ids)

    def test_bad_format(self, p64_strict, secret64):
        with pytest.raises(BadIdentityFormat):
            red(secret64, Identity.parse("12345", p64_strict), p64_strict)


class TestIdFormat:
    def test_strict_rejects_non_digit(self, p64_strict):
        assert not check_id_format(Identity.parse("79927398713x", p64_strict), p64_strict)

    def test_strict_luhn_against_oracle(self, p64_strict):
        rng = random.Random(5)
        hits = 0
        for _ in range(5000):
            raw = "".join(rng.choice("0123456789") for _ in range(12))
            ok = check_id_format(Identity.parse(raw, p64_strict), p64_strict)
            assert ok == luhn_by_doubling(raw)
            hits += ok
        assert 350 < hits < 650

    def test_strict_needs_twelve_digits(self, p64_strict):
        body = "7992739871"
        eleven = body + luhn_check_digit(body)
        assert luhn_by_doubling(eleven)
        assert not check_id_format(Identity.parse(eleven, p64_strict), p64_strict)
        assert check_id_format(Identity.parse("0" + eleven, p64_strict), p64_strict)

    def test_permissive_range(self, p23):
        assert not check_id_format(Identity.parse("1", p23), p23)
        assert check_id_format(Identity.parse("2", p23), p23)
        assert check_id_format(Identity.parse("21", p23), p23)
        assert not check_id_format(Identity.parse("22", p23), p23)
        assert not check_id_format(Identity.parse("abc", p23), p23)

    def test_random_identity_is_valid(self, p23, p64_strict):
        rng = random.Random(8)
        for params in (p23, p64_strict):
            for _ in range(300):
                assert check_id_format(random_identity(params, rng), params)

    def test_from_numeric_pads_under_strict(self, p64_strict):
        assert Identity.from_numeric(42, p64_strict).raw == "000000000042"


def test_freshness_boundaries(p23):
    dt = p23.delta_t
    assert check_freshness(100, 100, p23)
    assert check_freshness(100, 100 + dt, p23)
    assert not check_freshness(100, 100 + dt + 1, p23)
    assert not check_freshness(100, 99, p23)


requests = st.builds(
    lambda scheme, sid, raw, c1, c2, t: LoginRequest(
        scheme, sid if scheme is Scheme.SLH else raw, c1, c2, t
    ),
    st.sampled_from(list(Scheme)),
    st.integers(0, 2**64),
    st.text("0123456789", min_size=1, max_size=20),
    st.integers(0, 2**256),
    st.integers(0, 2**256),
    st.integers(0, 2**64 - 1),
)


class TestSerialization:
    @given(requests)
    def test_round_trip_and_canonical(self, req):
        data = serialize_request(req)
        assert deserialize_request(data) == req
        assert serialize_request(deserialize_request(data)) == data

    def test_thousand_random_requests(self):
        rng = random.Random(4)
        for _ in range(1000):
            scheme = rng.choice(list(Scheme))
            claimed = rng.getrandbits(64) if scheme is Scheme.SLH else str(rng.getrandbits(40))
            req = LoginRequest(scheme, claimed, rng.getrandbits(64), rng.getrandbits(64), rng.getrandbits(40))
            assert deserialize_request(serialize_request(req)) == req

    def test_shape(self):
        req = LoginRequest(Scheme.IMPROVED, "42", 255, 0, 16)
        assert serialize_request(req) == b'{"c1":"ff","c2":"0","id":"42","scheme":"improved","t":"10"}'
        slh = LoginRequest(Scheme.SLH, 255, 1, 2, 3)
        assert b'"id":"ff"' in serialize_request(slh)

    @pytest.mark.parametrize(
        "data",
        [
            b'{"c1":"ff","c2":"0","id":"42","scheme":"improved"',
            b"",
            b"[]",
            b'{"c1":"ff","c2":"0","id":"42","scheme":"improved"}',
            b'{"c1":"ff","c2":"0","id":"42","scheme":"nope","t":"1"}',
            b'{"c1":"0ff","c2":"0","id":"42","scheme":"improved","t":"1"}',
            b'{"c1":"ff","c2":"0","id":42,"scheme":"improved","t":"1"}',
            b'{"c1":"ff","c2":"0","id":"42","scheme":"improved","t":"10000000000000000"}',
            b'{"c1":"ff","c2":"0","id":"42","scheme":"improved","t":"1","x":"1"}',
            b"\xff\xfe",
        ],
    )
    def test_malformed(self, data):
        with pytest.raises(MalformedRequest):
            deserialize_request(data)

    def test_truncations_all_rejected(self):
        data = serialize_request(LoginRequest(Scheme.HWANG_LI, "123", 5, 6, 7))
        for cut in range(len(data)):
            with pytest.raises(MalformedRequest):
                deserialize_request(data[:cut])


def test_policy_enum_values():
    assert IdPolicy("strict") is IdPolicy.STRICT
    assert [s.value for s in Scheme] == ["hwang-li", "slh", "awasthi-lal", "improved"]
