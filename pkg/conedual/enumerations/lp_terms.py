"""
Linear Program Terms Enumeration.

This module provides the objective senses and row relations understood by
:mod:`conedual.lp`.

Classes:
    - Sense: Optimization direction.
    - Relation: Row relation of a constraint.

Usage:
    from conedual.enumerations.lp_terms import Relation, Sense
    relation = Relation.GE
"""


class Sense:
    """
    Objective Sense Enumeration.

    Values:
        - MIN: minimize the objective
        - MAX: maximize the objective

    Usage:
        sense = Sense.MIN
    """

    MIN = "MIN"
    MAX = "MAX"


class Relation:
    """
    Row Relation Enumeration.

    Values:
        - LE: row <= rhs
        - EQ: row == rhs
        - GE: row >= rhs

    Usage:
        relation = Relation.GE
    """

    LE = "<="
    EQ = "="
    GE = ">="

    ALL = (LE, EQ, GE)
