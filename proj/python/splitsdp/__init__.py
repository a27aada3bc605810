"""Split-algebra SDP bounds for binary codes.

The compiled extension does all real work; exact rationals cross the
boundary as "p/q" strings and are converted to Fraction here.
"""

from fractions import Fraction

try:
    from . import _core  # installed layout: extension inside the package
except ImportError:  # build tree: extension sits next to the package on sys.path
    import _core

__all__ = [
    "binomial",
    "krawtchouk",
    "beta_coefficient",
    "profile_count",
    "block_dimensions",
    "exact_code_size",
    "lp_bound",
    "model_summary",
    "problem_text",
    "code_check",
]

profile_count = _core.profile_count
block_dimensions = _core.block_dimensions
exact_code_size = _core.exact_code_size
model_summary = _core.model_summary
problem_text = _core.problem_text
code_check = _core.code_check


def binomial(n, k):
    return int(_core.binomial(n, k))


def krawtchouk(k, n, x):
    return int(_core.krawtchouk(k, n, x))


def beta_coefficient(i, j, t, k, n):
    return int(_core.beta_coefficient(i, j, t, k, n))


def lp_bound(n, d):
    return Fraction(_core.lp_bound(n, d))
