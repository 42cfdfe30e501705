"""
Configuration settings for the dynamics-at-infinity toolkit.
"""

from dataclasses import dataclass
import logging


@dataclass
class Config:
    """Central configuration for computations and output."""

    # Thompson group settings
    word_length: int = 6
    refinement_depth: int = 4

    # Degree growth settings
    degree_iterations: int = 6
    term_cap: int = 10**6

    # Valuative tree settings
    separation_depth: int = 64
    meet_max_blowups: int = 10_000

    # Eigenvaluation normalization: "t" (t = 1), "min" (min(s, t) = 1)
    # or "weighted" (s*b + t*b' = 1)
    eigen_normalization: str = "t"

    # Perron numbers
    strict_perron: bool = False

    # Decimal oracle precision (digits)
    decimal_digits: int = 50

    # Output settings
    output_format: str = "json"
    log_level: int = logging.WARNING

    def __post_init__(self):
        """Validate configuration after initialization."""
        if not 1 <= self.word_length <= 10:
            raise ValueError("word_length must be between 1 and 10")
        if not 1 <= self.degree_iterations <= 12:
            raise ValueError("degree_iterations must be between 1 and 12")
        if self.term_cap < 1:
            raise ValueError("term_cap must be positive")
        if self.refinement_depth < 1:
            raise ValueError("refinement_depth must be at least 1")
        if self.separation_depth < 1:
            raise ValueError("separation_depth must be at least 1")
        if self.meet_max_blowups < 1:
            raise ValueError("meet_max_blowups must be at least 1")
        if self.eigen_normalization not in ("t", "min", "weighted"):
            raise ValueError("eigen_normalization must be 't', 'min' or 'weighted'")
        if self.decimal_digits < 15:
            raise ValueError("decimal_digits must be at least 15")
        if self.output_format not in ("json", "dot", "csv", "text"):
            raise ValueError("output_format must be json, dot, csv or text")


# Default configuration instance
DEFAULT_CONFIG = Config()
