import io

import pytest

from lcpabe import encoding
from lcpabe.cli import run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(scope="module")
def keys(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    code, _, _ = call("setup", "--preset", "toy-exact", "--out", str(d / "pk.bin"), "--msk", str(d / "msk.bin"), "--seed", "7")
    assert code == 0
    return d


def test_end_to_end(keys):
    d = keys
    assert call("encrypt", "--pk", str(d / "pk.bin"), "--policy", "a & b", "--msg", "1", "--out", str(d / "ct.bin"), "--seed", "9")[0] == 0
    assert call("keygen", "--msk", str(d / "msk.bin"), "--attrs", "a,b", "--out", str(d / "sk.bin"), "--seed", "3")[0] == 0
    code, out, _ = call("decrypt", "--pk", str(d / "pk.bin"), "--sk", str(d / "sk.bin"), "--ct", str(d / "ct.bin"))
    assert (code, out.strip()) == (0, "1")


def test_unauthorized_decrypt_rejects(keys):
    d = keys
    call("encrypt", "--pk", str(d / "pk.bin"), "--policy", "a & b", "--msg", "1", "--out", str(d / "ct2.bin"), "--seed", "9")
    call("keygen", "--msk", str(d / "msk.bin"), "--attrs", "a", "--out", str(d / "ska.bin"), "--seed", "3")
    code, out, _ = call("decrypt", "--pk", str(d / "pk.bin"), "--sk", str(d / "ska.bin"), "--ct", str(d / "ct2.bin"))
    assert (code, out.strip()) == (2, "REJECT")


def test_multi_bit_message(keys):
    d = keys
    call("encrypt", "--pk", str(d / "pk.bin"), "--policy", "!c | d", "--msg", "10110", "--out", str(d / "ct3.bin"))
    call("keygen", "--msk", str(d / "msk.bin"), "--attrs", "a", "--out", str(d / "sk3.bin"))
    code, out, _ = call("decrypt", "--pk", str(d / "pk.bin"), "--sk", str(d / "sk3.bin"), "--ct", str(d / "ct3.bin"))
    assert (code, out.strip()) == (0, "10110")


def test_deterministic_given_seed(keys, tmp_path):
    a, b = tmp_path / "a.bin", tmp_path / "b.bin"
    for p in (a, b):
        call("encrypt", "--pk", str(keys / "pk.bin"), "--policy", "a", "--msg", "01", "--out", str(p), "--seed", "5")
    assert a.read_bytes() == b.read_bytes()


def test_written_containers_reparse(keys):
    pk = encoding.decode_pk((keys / "pk.bin").read_bytes())
    assert encoding.encode_pk(pk) == (keys / "pk.bin").read_bytes()


def test_policy_compile_output():
    code, out, _ = call("policy-compile", "--policy", "a | !b", "--smax", "4")
    assert code == 0
    assert "M 4x4" in out
    assert "  0:  1  0  0  0" in out
    assert "  3 -> 1 (b)" in out


def test_usage_errors(keys, tmp_path):
    assert call("bogus")[0] == 1
    assert call("setup", "--preset", "noisy-mock", "--out", str(tmp_path / "x"), "--msk", str(tmp_path / "y"))[0] == 1
    assert not (tmp_path / "x").exists()
    assert call("encrypt", "--pk", str(keys / "pk.bin"), "--policy", "a &", "--msg", "1", "--out", str(tmp_path / "c"))[0] == 1
    assert call("encrypt", "--pk", str(keys / "pk.bin"), "--policy", "a", "--msg", "12", "--out", str(tmp_path / "c"))[0] == 1
    assert call("decrypt", "--pk", str(keys / "msk.bin"), "--sk", "x", "--ct", "y")[0] == 1
    assert call("keygen", "--msk", str(tmp_path / "missing"), "--attrs", "a", "--out", str(tmp_path / "s"))[0] == 1


def test_params_and_size_report(keys):
    code, out, _ = call("params", "--preset", "noisy-mock")
    assert code == 0 and "q = 65537" in out
    call("keygen", "--msk", str(keys / "msk.bin"), "--attrs", "a", "--out", str(keys / "sk4.bin"))
    call("encrypt", "--pk", str(keys / "pk.bin"), "--policy", "a", "--msg", "1", "--out", str(keys / "ct4.bin"))
    code, out, _ = call("size-report", "--pk", str(keys / "pk.bin"), "--sk", str(keys / "sk4.bin"), "--ct", str(keys / "ct4.bin"))
    assert code == 0 and "elements ct = 17" in out


def test_harness_command():
    code, out, _ = call("harness", "--seed", "3", "--trials", "2")
    assert code == 0
    assert out.splitlines()[0] == "PASS pp-identity 3"


def test_dump_flag(keys, tmp_path):
    code, out, _ = call("keygen", "--msk", str(keys / "msk.bin"), "--attrs", "b", "--out", str(tmp_path / "s"), "--dump")
    assert code == 0 and "t 9x1" in out
