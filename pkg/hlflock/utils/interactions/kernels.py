import numpy as np


# Function to evaluate the Cucker-Smale weight
def cs_weight(distance, K, sigma, beta):
    """
    Cucker-Smale interaction strength K / (sigma^2 + d^2)^beta.

    Args:
        distance (float | np.ndarray): Distance(s) between the two birds, >= 0.
        K (float): Coupling strength, > 0.
        sigma (float): Softening length, > 0.
        beta (float): Decay exponent, > 0.

    Returns:
        float | np.ndarray: The weight(s), same shape as ``distance``.
    """
    if K <= 0 or sigma <= 0 or beta <= 0:
        raise ValueError(f"K, sigma and beta must be positive, got {K}, {sigma}, {beta}")
    d = np.asarray(distance, dtype=np.float64)
    out = K / (sigma * sigma + d * d) ** beta
    return float(out) if out.ndim == 0 else out


# Function to evaluate the conditional-expectation floor p / (1 + d)^alpha
def power_bound(distance, p, alpha):
    """
    Lower bound every random kernel must respect in conditional mean.

    Args:
        distance (float | np.ndarray): Distance(s) between bird and leader.
        p (float): Certificate level in (0, 1].
        alpha (float): Certificate exponent, >= 0.

    Returns:
        float | np.ndarray: p * (1 + d)^(-alpha).
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    if alpha < 0:
        raise ValueError(f"alpha must be non-negative, got {alpha}")
    d = np.asarray(distance, dtype=np.float64)
    out = p * (1.0 + d) ** (-alpha)
    return float(out) if out.ndim == 0 else out


def decay(distance, alpha):
    """(1 + d)^(-alpha), the distance factor shared by the random kernels."""
    return (1.0 + np.asarray(distance, dtype=np.float64)) ** (-alpha)
