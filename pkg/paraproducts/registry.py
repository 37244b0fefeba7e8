"""
Registry mapping simple string keys to experiment runners.
Used by app.suites to dispatch CLI subcommands.
"""

from paraproducts.experiments import (
    identity_suite,
    jn_check,
    lp_growth_experiment,
    prop22_fuzz,
    regularity_check,
    sweep_experiment,
    theorem11_experiment,
)
from paraproducts.extremal import triangle_growth

GROWTH = {
    "growth-theorem11": theorem11_experiment,
    "growth-lp": lp_growth_experiment,
    "growth-triangle": triangle_growth,
    "sweep": sweep_experiment,
}
CHECK_SUITES = {
    "prop22-fuzz": prop22_fuzz,
    "jn-check": jn_check,
    "identity-suite": identity_suite,
    "regularity": regularity_check,
}
