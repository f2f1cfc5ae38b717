"""Genetic stereo matching with a fuzzy matching-possibility fitness."""

from .evaluation import EvalReport, GroundTruth, bad_pixel_rate, sad_block_match
from .evolution import EvolutionLog, GaConfig, evolve, rank_survival_probability, step
from .fitness import FitnessContext, fitness, gradient_weight
from .fuzzy import (
    MembershipParams,
    PossibilityVolume,
    build_possibility_volume,
    matching_possibility,
    membership,
)
from .genome import crossover, mutate, random_init, rng_stream
from .imaging import GrayImage, StereoPair, load_pgm, save_pgm, sobel_gradient_norm
from .kernels import available_backends, default_backend_name

__version__ = "0.1.0"
