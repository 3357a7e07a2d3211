"""
Status Enumerations.

This module provides the status vocabularies used by the certifiers and the
linear-program solver. Values are plain strings so that they serialize into
reports unchanged.

Classes:
    - CertStatus: Outcome of certifying the minimum of a trigonometric polynomial.
    - PdMethod: Check that decided a positive-definiteness question.
    - LpStatus: Outcome of a linear-program solve.
    - BoundDirection: Direction tag attached to every reported bound.

Usage:
    from conedual.enumerations.status import CertStatus
    status = CertStatus.CERTIFIED_NONNEG
"""


class CertStatus:
    """
    Certification Status Enumeration.

    Values:
        - CERTIFIED_NONNEG: grid_min - margin >= -eps_pd
        - REFUTED: some evaluated point is below -eps_pd
        - INCONCLUSIVE: neither of the above

    Usage:
        status = CertStatus.REFUTED
    """

    CERTIFIED_NONNEG = "CERTIFIED_NONNEG"
    REFUTED = "REFUTED"
    INCONCLUSIVE = "INCONCLUSIVE"


class PdMethod:
    """
    Positive-Definiteness Method Enumeration.

    Values:
        - L1_BOUND: f(0) - 2 * sum |f(n)| >= 0 decided the question
        - GRID_CERTIFICATE: a (refined) grid certificate decided the question

    Usage:
        method = PdMethod.L1_BOUND
    """

    L1_BOUND = "L1_BOUND"
    GRID_CERTIFICATE = "GRID_CERTIFICATE"


class LpStatus:
    """
    Linear Program Status Enumeration.

    Values:
        - OPTIMAL: an optimal vertex was found
        - INFEASIBLE: the constraints admit no point
        - UNBOUNDED: the objective is unbounded in the optimization direction
        - NUMERICAL_FAILURE: the basis became singular or a pivot broke down
        - ITERATION_LIMIT: the pivot budget ran out

    Usage:
        status = LpStatus.OPTIMAL
    """

    OPTIMAL = "OPTIMAL"
    INFEASIBLE = "INFEASIBLE"
    UNBOUNDED = "UNBOUNDED"
    NUMERICAL_FAILURE = "NUMERICAL_FAILURE"
    ITERATION_LIMIT = "ITERATION_LIMIT"


class BoundDirection:
    """
    Bound Direction Enumeration.

    Values:
        - LOWER: the reported number is a certified lower bound
        - UPPER: the reported number is a certified upper bound

    Usage:
        direction = BoundDirection.UPPER
    """

    LOWER = "LOWER"
    UPPER = "UPPER"
