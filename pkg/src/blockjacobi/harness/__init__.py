"""Benchmark harness: matrix generators, the extended-precision eigenvalue
oracle, benchmark drivers with CSV output, and the command line interface."""

from .generators import (
    gen_random_hermitian,
    gen_ill_conditioned,
    gen_random_normal,
    gen_spd,
)
from .oracle import OracleEigenvalues, OracleError, oracle_eigen
from .bench import BenchmarkSpec, run_benchmark

__all__ = [
    "gen_random_hermitian",
    "gen_ill_conditioned",
    "gen_random_normal",
    "gen_spd",
    "OracleEigenvalues",
    "OracleError",
    "oracle_eigen",
    "BenchmarkSpec",
    "run_benchmark",
]
