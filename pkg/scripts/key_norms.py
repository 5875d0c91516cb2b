"""Compare key norms from real keygen and from the trapdoorless simulated keygen."""

import argparse
import itertools
import logging
from dataclasses import dataclass

import numpy as np

from lcpabe.cpabe import keygen, preset, setup
from lcpabe.harness import build_proof_trapdoor, simulate_setup, simulated_keygen
from lcpabe.lsss import compile_policy, complete_set, parse_policy, recon_coeffs
from lcpabe.zq import Rng


@dataclass
class Config:
    policy: str = "(a & b) | (c & !d)"
    keys_per_set: int = 10
    seed: int = 3


def run(cfg: Config) -> dict:
    params = preset("harness")
    policy = compile_policy(parse_policy(cfg.policy, "abcd"), params.s_max)
    sim = simulate_setup(Rng(cfg.seed).child("sim"), params, policy)
    _, msk = setup(Rng(cfg.seed).child("real"), params)
    rng = Rng(cfg.seed).child("keys")
    real, simulated = [], []
    for r in range(params.n_base + 1):
        for held in itertools.combinations(range(params.n_base), r):
            labels = complete_set(held, params.n_base)
            if recon_coeffs(policy, labels, params.q) is not None:
                continue
            ptd = build_proof_trapdoor(sim, labels)
            for _ in range(cfg.keys_per_set):
                real += [float(np.linalg.norm(k.data)) for k in keygen(rng, msk, labels).k.values()]
                simulated += [float(np.linalg.norm(k.data)) for k in simulated_keygen(rng, sim, ptd).k.values()]
    real_med, sim_med = float(np.median(real)), float(np.median(simulated))
    return {
        "keys": len(real),
        "real_median_norm": real_med,
        "simulated_median_norm": sim_med,
        "ratio": max(real_med, sim_med) / min(real_med, sim_med),
        "within_factor_3": max(real_med, sim_med) <= 3 * min(real_med, sim_med),
    }


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--policy", default=Config.policy)
    parser.add_argument("--keys-per-set", type=int, default=Config.keys_per_set)
    parser.add_argument("--seed", type=int, default=Config.seed)
    args = parser.parse_args()
    logging.getLogger("lcpabe").setLevel(logging.ERROR)
    for key, value in run(Config(args.policy, args.keys_per_set, args.seed)).items():
        print(f"{key:>22}: {value}")


if __name__ == "__main__":
    main()
