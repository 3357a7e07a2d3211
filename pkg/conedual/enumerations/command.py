"""
Command Enumeration.

This module provides the commands accepted in a run configuration.

Classes:
    - Command: Enumeration of commands.

Usage:
    from conedual.enumerations.command import Command
    command = Command.REVESZ
"""


class Command:
    """
    Command Enumeration.

    Values:
        - REVESZ: alpha/omega duality bracket
        - WIENER: C(L,N)/K(L,N) bracket
        - CHECK_PD: positive-definiteness check of one sequence
        - DECOMPOSE: decomposition of a dual element into C+ + P+
        - PARSEVAL_TEST: randomized Parseval identity test

    Usage:
        command = Command.WIENER
    """

    REVESZ = "revesz"
    WIENER = "wiener"
    CHECK_PD = "check-pd"
    DECOMPOSE = "decompose"
    PARSEVAL_TEST = "parseval-test"

    ALL = (REVESZ, WIENER, CHECK_PD, DECOMPOSE, PARSEVAL_TEST)
