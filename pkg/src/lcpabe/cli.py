"""Command-line interface.

Exit codes: 0 on success, 1 on usage or input errors, 2 when a
cryptographic operation fails (an unauthorized decryption prints REJECT).
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Sequence

from . import encoding
from .cpabe import (
    PRESETS,
    CryptoError,
    compile_for,
    decrypt,
    encrypt,
    keygen_for,
    preset,
    setup,
    size_report,
)
from .commit import TRAPDOOR_MOCK
from .harness import harness_report
from .lsss import LsssError, PolicyError, compile_policy, complete_set, parse_policy, recon_coeffs
from .zq import Rng

EXIT_OK, EXIT_USAGE, EXIT_CRYPTO = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return value


def _bits(text: str) -> str:
    if not text or set(text) - {"0", "1"}:
        raise argparse.ArgumentTypeError("message must be a nonempty bitstring")
    return text


def _names(text: str) -> list[str]:
    names = [s.strip() for s in text.split(",") if s.strip()]
    if len(set(names)) != len(names):
        raise argparse.ArgumentTypeError("attribute names repeat")
    return names


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lcpabe", description="Lattice attribute-based encryption at toy sizes; ciphertexts do not grow with the policy.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help)
        p.add_argument("--dump", action="store_true", help="print matrices row-major as reduced representatives")
        return p

    p = add("setup", "sample a public key and master secret key")
    p.add_argument("--preset", choices=PRESETS, default="toy-exact")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--attrs", type=_names, help="attribute universe (defaults to a, b, c, ...)")
    p.add_argument("--out", type=Path, required=True, help="public key path")
    p.add_argument("--msk", type=Path, required=True, help="master secret key path")

    p = add("keygen", "issue a key for a set of attributes")
    p.add_argument("--msk", type=Path, required=True)
    p.add_argument("--attrs", type=_names, required=True, help="held attributes, comma separated")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--out", type=Path, required=True)

    p = add("encrypt", "encrypt a bitstring under a policy")
    p.add_argument("--pk", type=Path, required=True)
    p.add_argument("--policy", required=True)
    p.add_argument("--msg", type=_bits, required=True, help="bits, each encrypted separately")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--out", type=Path, required=True)

    p = add("decrypt", "decrypt a ciphertext file")
    p.add_argument("--pk", type=Path, required=True)
    p.add_argument("--sk", type=Path, required=True)
    p.add_argument("--ct", type=Path, required=True)

    p = add("policy-compile", "compile a policy and print its matrix and row labels")
    p.add_argument("--policy", required=True)
    p.add_argument("--smax", type=int, required=True)
    p.add_argument("--pk", type=Path, help="take the attribute universe from a public key")
    p.add_argument("--out", type=Path)

    p = add("params", "print the parameters of a preset")
    p.add_argument("--preset", choices=PRESETS, default="toy-exact")

    p = add("harness", "run the exact identity checks of the simulated setup")
    p.add_argument("--preset", choices=PRESETS, default="harness")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--policy", default="(a & b) | (c & !d)")
    p.add_argument("--trials", type=int, default=4, help="unauthorized sets to try")

    p = add("size-report", "count field elements and bytes of stored objects")
    p.add_argument("--pk", type=Path, required=True)
    p.add_argument("--sk", type=Path)
    p.add_argument("--ct", type=Path)
    return parser


def _read(path: Path) -> bytes:
    try:
        return path.read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: Path, data: bytes) -> None:
    try:
        path.write_bytes(data)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _dump(name: str, M, out) -> None:
    print(f"{name} {M.rows}x{M.cols}", file=out)
    for row in M.data:
        print(" ".join(str(int(v)) for v in row), file=out)


def _cmd_setup(args, out) -> int:
    params = preset(args.preset)
    if params.backend == TRAPDOOR_MOCK:
        raise UsageError("the noisy-mock preset needs the master trapdoor to decrypt and is for tests only")
    if args.attrs is not None and len(args.attrs) != params.n_base:
        raise UsageError(f"preset {args.preset} has {params.n_base} attributes, got {len(args.attrs)}")
    pk, msk = setup(Rng(args.seed).child("setup"), params, args.attrs)
    _write(args.out, encoding.encode_pk(pk))
    _write(args.msk, encoding.encode_msk(msk))
    print(f"universe {','.join(pk.universe)}", file=out)
    if args.dump:
        for name, M in [("B", pk.pp.B), ("A", pk.A), ("y", pk.y)]:
            _dump(name, M, out)
    return EXIT_OK


def _cmd_keygen(args, out) -> int:
    msk = encoding.decode_msk(_read(args.msk))
    try:
        sk = keygen_for(Rng(args.seed).child("keygen"), msk, args.attrs)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write(args.out, encoding.encode_sk(sk, msk.pk.params))
    print(f"labels {','.join(map(str, sk.labels))}", file=out)
    if args.dump:
        _dump("t", sk.t, out)
        for u in sk.labels:
            _dump(f"k[{u}]", sk.k[u], out)
    return EXIT_OK


def _cmd_encrypt(args, out) -> int:
    pk = encoding.decode_pk(_read(args.pk))
    policy = compile_for(pk, args.policy)
    rng = Rng(args.seed).child("encrypt")
    cts = tuple(encrypt(rng.child(str(i)), pk, int(b), policy) for i, b in enumerate(args.msg))
    _write(args.out, encoding.encode_ct_file(encoding.CiphertextFile(policy, cts), pk.params))
    print(f"policy {policy.formula}", file=out)
    if args.dump:
        for i, ct in enumerate(cts):
            for name in ("c1", "c2", "c3"):
                _dump(f"ct[{i}].{name}", getattr(ct, name), out)
    return EXIT_OK


def _cmd_decrypt(args, out) -> int:
    pk = encoding.decode_pk(_read(args.pk))
    sk, sk_params = encoding.decode_sk(_read(args.sk))
    ct_file, ct_params = encoding.decode_ct_file(_read(args.ct))
    if sk_params != pk.params or ct_params != pk.params:
        raise UsageError("key or ciphertext was made under different parameters")
    bits = [decrypt(pk, sk, ct_file.policy, ct) for ct in ct_file.cts]
    if any(b is None for b in bits):
        print("REJECT", file=out)
        return EXIT_CRYPTO
    print("".join(map(str, bits)), file=out)
    return EXIT_OK


def _literal(label: int, names: Sequence[str]) -> str:
    n = len(names)
    return names[label] if label < n else "!" + names[label - n]


def _cmd_policy_compile(args, out) -> int:
    universe = None
    params = None
    if args.pk is not None:
        pk = encoding.decode_pk(_read(args.pk))
        universe, params = pk.universe, pk.params
    policy = compile_policy(parse_policy(args.policy, universe), args.smax)
    print(f"policy {policy.formula}", file=out)
    print(f"M {policy.ell}x{policy.s_max}", file=out)
    for i, row in enumerate(policy.M):
        print(f"  {i}: " + " ".join(f"{int(v):2d}" for v in row), file=out)
    print("rho", file=out)
    for i, lab in enumerate(policy.rho):
        print(f"  {i} -> {lab} ({_literal(lab, policy.formula.names)})", file=out)
    if args.out is not None:
        if params is None:
            raise UsageError("--out needs --pk so the policy container carries parameters")
        _write(args.out, encoding.encode_policy(policy, params))
    return EXIT_OK


def _cmd_params(args, out) -> int:
    params = preset(args.preset)
    for key, value in asdict(params).items():
        print(f"{key} = {value}", file=out)
    print(f"N = {params.N}", file=out)
    return EXIT_OK


def _cmd_harness(args, out) -> int:
    params = preset(args.preset)
    if params.backend == TRAPDOOR_MOCK:
        raise UsageError("the harness needs the succinct-fold backend")
    formula = parse_policy(args.policy, [chr(ord("a") + i) for i in range(params.n_base)])
    policy = compile_policy(formula, params.s_max)
    rng = Rng(args.seed).child("harness-sets")
    sets = []
    for _ in range(200):
        if len(sets) == args.trials:
            break
        coins = rng.integers(0, 2, params.n_base)
        held = {i for i in range(params.n_base) if coins[i]}
        labels = complete_set(held, params.n_base)
        if recon_coeffs(policy, labels, params.q) is None and labels not in sets:
            sets.append(labels)
    lines = harness_report(args.seed, params, policy, sets)
    for line in lines:
        print(line, file=out)
    return EXIT_OK if all(line.startswith("PASS") for line in lines) else EXIT_CRYPTO


def _cmd_size_report(args, out) -> int:
    pk_bytes = _read(args.pk)
    pk = encoding.decode_pk(pk_bytes)
    sk = ct = None
    sizes = {"pk": len(pk_bytes)}
    if args.sk is not None:
        raw = _read(args.sk)
        sk, _ = encoding.decode_sk(raw)
        sizes["sk"] = len(raw)
    if args.ct is not None:
        ct_file, _ = encoding.decode_ct_file(_read(args.ct))
        if ct_file.cts:
            ct = ct_file.cts[0]
            sizes["ct"] = len(encoding.encode_ct(ct, pk.params))
    for key, value in size_report(pk, sk, ct).items():
        print(f"elements {key} = {value}", file=out)
    for key, value in sizes.items():
        print(f"bytes {key} = {value}", file=out)
    return EXIT_OK


_COMMANDS = {
    "setup": _cmd_setup,
    "keygen": _cmd_keygen,
    "encrypt": _cmd_encrypt,
    "decrypt": _cmd_decrypt,
    "policy-compile": _cmd_policy_compile,
    "params": _cmd_params,
    "harness": _cmd_harness,
    "size-report": _cmd_size_report,
}


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    logging.getLogger("lcpabe").setLevel(logging.ERROR)
    try:
        args = build_parser().parse_args(argv)
        return _COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    except (encoding.FormatError, PolicyError, LsssError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    except CryptoError as exc:
        print(f"REJECT: {exc}", file=out)
        return EXIT_CRYPTO


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
