"""Decryption success rate and error spread at the noisy-mock preset."""

import argparse
import logging
from dataclasses import dataclass

import numpy as np

from lcpabe.cpabe import compile_for, decrypt, encrypt_traced, error_term, keygen_for, make_backend, preset, setup
from lcpabe.zq import Rng


@dataclass
class Config:
    trials: int = 1000
    keys: int = 20
    seed: int = 1


CASES = [("a & b", ["a", "b"]), ("a | !b", ["a"]), ("!a & b", ["b"]), ("a", ["a", "b"])]


def run(cfg: Config) -> dict:
    params = preset("noisy-mock")
    pk, msk = setup(Rng(cfg.seed).child("setup"), params)
    backend = make_backend(pk, msk.td_B)
    rng = Rng(cfg.seed).child("trials")
    errors, failures = [], 0
    per_key = max(1, cfg.trials // cfg.keys)
    for trial in range(cfg.trials):
        text, held = CASES[(trial // per_key) % len(CASES)]
        if trial % per_key == 0:
            policy = compile_for(pk, text)
            sk = keygen_for(rng, msk, held, backend)
        msg = trial % 2
        ct, trace = encrypt_traced(rng, pk, msg, policy, backend)
        errors.append(error_term(pk, sk, policy, trace, backend))
        failures += decrypt(pk, sk, policy, ct, backend) != msg
    errors = np.array(errors, dtype=float)
    return {
        "trials": cfg.trials,
        "failures": failures,
        "success_rate": 1 - failures / cfg.trials,
        "error_std": float(errors.std()),
        "error_max": float(np.abs(errors).max()),
        "model_std": params.budget / 4,
        "budget": params.budget,
        "q/4": params.q / 4,
    }


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=Config.trials)
    parser.add_argument("--keys", type=int, default=Config.keys)
    parser.add_argument("--seed", type=int, default=Config.seed)
    args = parser.parse_args()
    logging.getLogger("lcpabe").setLevel(logging.ERROR)
    for key, value in run(Config(args.trials, args.keys, args.seed)).items():
        print(f"{key:>13}: {value}")


if __name__ == "__main__":
    main()
