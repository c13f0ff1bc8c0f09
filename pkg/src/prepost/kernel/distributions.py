"""Student-t tail probabilities and quantiles."""

import math

from scipy.special import betainc, stdtrit


def student_t_two_sided_p(t: float, df: float) -> float:
    """Two-sided tail probability P(|T_df| >= |t|).

    Uses the identity P(|T| >= |t|) = I_x(df/2, 1/2) with x = df / (df + t^2),
    I being the regularized incomplete beta function.

    Args:
        t: Test statistic, may be infinite
        df: Degrees of freedom, positive

    Returns:
        float: Probability in [0, 1]; NaN if t is NaN

    Raises:
        ValueError: If df is not positive
    """
    if not df > 0:
        raise ValueError(f"degrees of freedom must be positive, got {df}")
    if math.isnan(t):
        return math.nan
    if math.isinf(t):
        return 0.0
    x = df / (df + t * t)
    p = float(betainc(0.5 * df, 0.5, x))
    return min(1.0, max(0.0, p))


def student_t_quantile(q: float, df: float) -> float:
    """Quantile function of the Student-t distribution.

    Args:
        q: Probability in (0, 1)
        df: Degrees of freedom, positive

    Returns:
        float: t such that P(T_df <= t) = q
    """
    if not df > 0:
        raise ValueError(f"degrees of freedom must be positive, got {df}")
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    return float(stdtrit(df, q))
