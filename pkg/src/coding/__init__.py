"""符号编码模块：字母表、转移矩阵、编码 Θ、符号势、Markov 检验与 Gurevich 压"""

from .alphabet import Alphabet, TransitionMatrix, build_alphabet, transitivity_witness
from .codec import (
    conjugacy_mismatches,
    decode,
    encode,
    encode_path,
    letter_at,
    shift_distance,
    trajectory_distance,
    word_edges,
)
from .markov import markov_test
from .models import Letter, MarkovTestResult, PressureEstimate, SymbolicGibbsCheck, SymbolSequence
from .symbolic import birkhoff_sum, f_symb, gurevich_pressure, symbolic_gibbs_check, word_mass, words

__all__ = [
    "Alphabet",
    "Letter",
    "TransitionMatrix",
    "SymbolSequence",
    "SymbolicGibbsCheck",
    "MarkovTestResult",
    "PressureEstimate",
    "build_alphabet",
    "transitivity_witness",
    "encode",
    "encode_path",
    "conjugacy_mismatches",
    "decode",
    "letter_at",
    "word_edges",
    "shift_distance",
    "trajectory_distance",
    "f_symb",
    "birkhoff_sum",
    "word_mass",
    "words",
    "symbolic_gibbs_check",
    "gurevich_pressure",
    "markov_test",
]
