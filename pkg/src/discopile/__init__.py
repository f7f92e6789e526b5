"""Pregroup sentences to parameterised circuits, exact simulation, and controlled mixtures."""

__version__ = "0.1.0"

from .kernels import BACKEND
from .errors import DiscopileError
from .pregroup import Lexicon, PregroupType, builtin_lexicon, is_grammatical, reduce, ty, type_of_sentence
from .diagram import Diagram, compose_two_sentence, copy_noun, diagram_from_sentence, validate
from .circuit import Circuit, Gate, bind
from .sim import run_density, run_pure
from .ansatz import AnsatzConfig, ParamStore, init_params, param_names
from .compiler import compile, lower
from .semantics import fidelity, fuzz, phaser, von_neumann_entropy
from .mixer import Branch, build_m_way, build_prediction_mixture, build_pronoun_mixture, build_two_way, mixture_oracle
from .corpus import EXPERIMENT_ANSATZ, builtin_corpus, cross_category_pairs
from .train import SpsaConfig, train
from .experiment import run_experiment

__all__ = [
    "BACKEND", "DiscopileError",
    "Lexicon", "PregroupType", "builtin_lexicon", "is_grammatical", "reduce", "ty", "type_of_sentence",
    "Diagram", "compose_two_sentence", "copy_noun", "diagram_from_sentence", "validate",
    "Circuit", "Gate", "bind", "run_density", "run_pure",
    "AnsatzConfig", "ParamStore", "init_params", "param_names", "compile", "lower",
    "fidelity", "fuzz", "phaser", "von_neumann_entropy",
    "Branch", "build_m_way", "build_prediction_mixture", "build_pronoun_mixture", "build_two_way",
    "mixture_oracle", "EXPERIMENT_ANSATZ", "builtin_corpus", "cross_category_pairs",
    "SpsaConfig", "train", "run_experiment",
]
