"""Fault-tolerant VQE workbench: Clifford+T synthesis of rotations, circuit
transpilation with T-count/T-depth accounting, and variational minimization
on the transpiled circuits."""

from .circuit import CliffordTCircuit, ParamCircuit, ParamGate, t_count, t_depth, transpile
from .exact import exact_synthesize, word_to_matrix
from .models import ModelSpec, build_ansatz, build_hamiltonian, exact_ground_energy
from .statevector import PauliSum, StateVector, apply_circuit, expectation, set_precision
from .synthesis import SynthesisCache, SynthesisRequest, SynthesisResult, euler_zxz, synthesize, synthesize_axis
from .vqe import VQEConfig, VQETrace, minimize

__all__ = [
    "CliffordTCircuit",
    "ModelSpec",
    "ParamCircuit",
    "ParamGate",
    "PauliSum",
    "StateVector",
    "SynthesisCache",
    "SynthesisRequest",
    "SynthesisResult",
    "VQEConfig",
    "VQETrace",
    "apply_circuit",
    "build_ansatz",
    "build_hamiltonian",
    "euler_zxz",
    "exact_ground_energy",
    "exact_synthesize",
    "expectation",
    "minimize",
    "set_precision",
    "synthesize",
    "synthesize_axis",
    "t_count",
    "t_depth",
    "transpile",
    "word_to_matrix",
]
