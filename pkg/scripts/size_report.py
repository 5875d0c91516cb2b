"""Serialized sizes of keys and ciphertexts as the universe and s_max grow."""

import argparse
import logging
from dataclasses import dataclass, field, replace

from lcpabe.cpabe import compile_for, encrypt, keygen_for, preset, setup, size_report
from lcpabe.encoding import encode_ct, encode_sk
from lcpabe.zq import Rng


@dataclass
class Config:
    universes: list[int] = field(default_factory=lambda: [4, 8, 16])
    s_max: list[int] = field(default_factory=lambda: [4, 8])
    seed: int = 5


def run(cfg: Config) -> list[dict]:
    base = preset("toy-exact")
    rows = []
    for N in cfg.universes:
        for s_max in cfg.s_max:
            params = replace(base, n_base=N // 2, s_max=s_max)
            pk, msk = setup(Rng(cfg.seed).child(f"{N}-{s_max}"), params)
            sk = keygen_for(Rng(cfg.seed), msk, ["a"])
            ct = encrypt(Rng(cfg.seed), pk, 1, compile_for(pk, "a & !b"))
            elements = size_report(pk, sk, ct)
            rows.append({
                "N": N,
                "s_max": s_max,
                "pk_elements": elements["pk"],
                "sk_elements": elements["sk"],
                "ct_elements": elements["ct"],
                "sk_bytes": len(encode_sk(sk, params)),
                "ct_bytes": len(encode_ct(ct, params)),
            })
    return rows


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=Config.seed)
    args = parser.parse_args()
    logging.getLogger("lcpabe").setLevel(logging.ERROR)
    rows = run(Config(seed=args.seed))
    keys = list(rows[0])
    print(" ".join(f"{k:>12}" for k in keys))
    for row in rows:
        print(" ".join(f"{row[k]:>12}" for k in keys))


if __name__ == "__main__":
    main()
