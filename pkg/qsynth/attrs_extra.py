"""Extra functionality for attrs."""

import logging
import typing

import attr
import numpy as np


def log(name):
    """Returns a logger attr.ib

    :param name: name to pass to logging.getLogger()
    :rtype: attr.ib
    """
    return attr.ib(default=logging.getLogger(name),
                   repr=False,
                   hash=False,
                   eq=False)


def qubit_index(instance, attribute, value):
    """attrs validator for a single qubit index."""

    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise TypeError(f'{attribute.name} must be an int, not {type(value).__name__}')
    if value < 0:
        raise ValueError(f'{attribute.name} must be non-negative, got {value}')


def qubit_tuple(value: typing.Iterable[int]) -> typing.Tuple[int, ...]:
    """attrs converter for a register of qubit indices."""
    return tuple(int(q) for q in value)


def distinct_qubits(instance, attribute, value):
    if len(set(value)) != len(value):
        raise ValueError(f'{attribute.name} contains duplicate qubits: {value}')


def readonly_matrix(value) -> np.ndarray:
    """attrs converter producing an immutable complex array."""

    matrix = np.array(value, dtype=complex)
    matrix.setflags(write=False)
    return matrix
