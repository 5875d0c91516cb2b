"""Lattice attribute-based encryption whose ciphertext size does not depend on the policy, at toy scale."""

from .cpabe import (
    Ciphertext,
    MasterSecretKey,
    PublicKey,
    SchemeParams,
    SecretKey,
    decrypt,
    encrypt,
    keygen,
    keygen_for,
    preset,
    setup,
)
from .lsss import compile_policy, parse_policy
from .zq import Rng, ZqMatrix

__all__ = [
    "Ciphertext",
    "MasterSecretKey",
    "PublicKey",
    "Rng",
    "SchemeParams",
    "SecretKey",
    "ZqMatrix",
    "compile_policy",
    "decrypt",
    "encrypt",
    "keygen",
    "keygen_for",
    "parse_policy",
    "preset",
    "setup",
]
