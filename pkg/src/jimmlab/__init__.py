"""Continued-fraction tools around the Jimm map.

Exact continued-fraction words, certified real inputs, the Jimm map on
words, rationals, quadratic surds and reals, partial-quotient statistics,
and integer-relation searches for the transformed constants.
"""

from .cf import CFWord, PrecisionInterval, cf_from_interval, cf_from_rational, rational_from_cf
from .errors import BudgetExceeded, JimmlabError, PrecisionError
from .jimm import (CertifiedJimm, JimmReal, harmonic_check, jimm_noble, jimm_rational, jimm_real,
                   jimm_surd, jimm_word, noble_twin)
from .reals import RealSource, expand
from .stats import FrequencyTable, empirical_run_census, frequency_table, operate_and_tabulate
from .surd import PeriodicCF, QuadraticSurd, periodic_cf_to_surd, surd_to_periodic_cf

__version__ = "0.1.0"

__all__ = [
    "CFWord", "PrecisionInterval", "cf_from_interval", "cf_from_rational", "rational_from_cf",
    "BudgetExceeded", "JimmlabError", "PrecisionError",
    "CertifiedJimm", "JimmReal", "harmonic_check", "jimm_noble", "jimm_rational", "jimm_real",
    "jimm_surd", "jimm_word", "noble_twin",
    "RealSource", "expand",
    "FrequencyTable", "empirical_run_census", "frequency_table", "operate_and_tabulate",
    "PeriodicCF", "QuadraticSurd", "periodic_cf_to_surd", "surd_to_periodic_cf",
]
