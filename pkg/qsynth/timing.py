"""Wall-clock durations of the synthesis and verification phases."""

import collections
import contextlib
import dataclasses
import time
import typing

SYNTHESIS = 'synthesis'
VERIFICATION = 'verification'


@dataclasses.dataclass
class Timing:
    """Registers phases by name and duration (in seconds)."""

    phases: typing.Dict[str, float] = dataclasses.field(
        default_factory=collections.OrderedDict)

    @contextlib.contextmanager
    def record_duration(self, name: str):
        """Records the duration of the context under the given name.

        Recording the same name twice adds the durations, so a sweep can time
        every instance under one phase name.
        """
        start_time = time.monotonic()
        try:
            yield
        finally:
            duration = time.monotonic() - start_time
            self.phases[name] = self.phases.get(name, 0.0) + duration

    def total(self) -> float:
        return sum(self.phases.values())

    def __add__(self, other: 'Timing') -> 'Timing':
        """Returns the merger of 'self' and 'other', adding shared phases."""

        if not isinstance(other, Timing):
            return NotImplemented

        result = Timing(phases=self.phases.copy())
        result += other
        return result

    def __iadd__(self, other: 'Timing') -> 'Timing':
        if not isinstance(other, Timing):
            return NotImplemented

        for name, duration in other.phases.items():
            self.phases[name] = self.phases.get(name, 0.0) + duration
        return self

    def __getitem__(self, item: str) -> float:
        return self.phases[item]

    def to_json_compat(self) -> typing.Dict[str, float]:
        """Durations rounded to microseconds, in recording order."""
        return {name: round(duration, 6) for name, duration in self.phases.items()}
