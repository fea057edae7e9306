"""Control-field profiles Omega_s(t) for the adiabatic storage protocol."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

KINDS = ("constant", "storage_ramp", "custom_samples")


class ScheduleDomainError(ValueError):
    pass


class ProtocolError(ValueError):
    """Schedules do not realize the ratio-locked storage protocol."""


@dataclass(frozen=True)
class ControlSchedule:
    kind: str
    omega_max: float
    T: float
    ratio_group: str | None = None
    samples: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if not self.T > 0:
            raise ValueError(f"schedule duration must be positive, got {self.T}")
        if self.omega_max < 0:
            raise ValueError("omega_max must be non-negative")
        if self.kind == "custom_samples":
            samples = tuple((float(t), float(w)) for t, w in self.samples)
            ts = [t for t, _ in samples]
            if len(samples) < 2 or ts != sorted(ts) or len(set(ts)) != len(ts):
                raise ValueError("custom samples need >= 2 points with strictly increasing t")
            if ts[0] > 0 or ts[-1] < self.T:
                raise ValueError("custom samples must cover [0, T]")
            if any(w < 0 for _, w in samples):
                raise ValueError("custom samples must be non-negative")
            object.__setattr__(self, "samples", samples)

    def retimed(self, T: float) -> "ControlSchedule":
        if self.kind == "custom_samples":
            scale = T / self.T
            return replace(self, T=T, samples=tuple((t * scale, w) for t, w in self.samples))
        return replace(self, T=T)


def constant(omega_max: float, T: float = 1.0, ratio_group: str | None = None) -> ControlSchedule:
    return ControlSchedule("constant", omega_max, T, ratio_group)


def storage_ramp(omega_max: float, T: float, ratio_group: str | None = "storage") -> ControlSchedule:
    return ControlSchedule("storage_ramp", omega_max, T, ratio_group)


def omega(schedule: ControlSchedule, t: float) -> float:
    """Rabi frequency of ``schedule`` at time ``t`` in ``[0, T]``."""
    T = schedule.T
    if not (0.0 <= t <= T):
        # tolerate round-off at the end of a time grid
        if -1e-12 * T <= t < 0:
            t = 0.0
        elif T < t <= T * (1 + 1e-12):
            t = T
        else:
            raise ScheduleDomainError(f"t={t} outside [0, {T}]")
    if schedule.kind == "constant":
        return schedule.omega_max
    if schedule.kind == "storage_ramp":
        if t == T:
            return 0.0
        return schedule.omega_max * math.cos(math.pi * t / (2 * T)) ** 2
    ts, ws = zip(*schedule.samples)
    return float(np.interp(t, ts, ws))


def omega_array(schedule: ControlSchedule, ts: np.ndarray) -> np.ndarray:
    """Vectorised :func:`omega` for times already inside ``[0, T]``."""
    ts = np.clip(np.asarray(ts, dtype=float), 0.0, schedule.T)
    if schedule.kind == "constant":
        return np.full(ts.shape, schedule.omega_max)
    if schedule.kind == "storage_ramp":
        out = schedule.omega_max * np.cos(np.pi * ts / (2 * schedule.T)) ** 2
        out[ts == schedule.T] = 0.0
        return out
    t, w = zip(*schedule.samples)
    return np.interp(ts, t, w)


def _shape_key(s: ControlSchedule):
    if s.kind == "custom_samples":
        ts, ws = zip(*s.samples)
        peak = max(ws)
        return (s.kind, s.T, ts, tuple(w / peak for w in ws) if peak else ws)
    return (s.kind, s.T)


def ratio_groups(schedules: Sequence[ControlSchedule]) -> dict[str, list[int]]:
    groups: dict[str, list[int]] = {}
    for k, s in enumerate(schedules):
        if s.ratio_group is not None:
            groups.setdefault(s.ratio_group, []).append(k)
    return groups


def check_ratio_lock(schedules: Sequence[ControlSchedule]) -> None:
    """Raise ProtocolError unless every schedule shares one ratio-locked shape."""
    if not schedules:
        raise ProtocolError("no schedules")
    groups = ratio_groups(schedules)
    if len(groups) != 1 or len(next(iter(groups.values()))) != len(schedules):
        raise ProtocolError("storage protocol needs all controls in a single ratio_group")
    keys = {_shape_key(s) for s in schedules}
    if len(keys) != 1:
        raise ProtocolError("schedules in a ratio_group must share kind, duration and shape")
    if any(s.omega_max <= 0 for s in schedules):
        raise ProtocolError("ratio-locked schedules need positive peak amplitudes")


def limit_weights(schedules: Sequence[ControlSchedule]) -> np.ndarray | None:
    """Relative control weights of a ratio-locked set, valid even where all Omega vanish.

    Returns None when the schedules are not ratio-locked.
    """
    try:
        check_ratio_lock(schedules)
    except ProtocolError:
        return None
    w = np.array([s.omega_max for s in schedules], dtype=float)
    return w / w.max()


def theta_trajectory(config, nsamples: int) -> list[tuple[float, float]]:
    """Sampled storage angle theta(t) over the full duration of ``config``.

    At ``t = T`` all controls are off and theta takes its limiting value pi/2.
    """
    from corrmem.polariton import mixing_angles

    if config.topology() != "line":
        raise ProtocolError("theta trajectory is defined for the straight-line topology")
    schedules = [config.controls[e] for e in config.ensemble_ids]
    if not all(s.kind == "constant" for s in schedules):
        check_ratio_lock(schedules)
    T = config.duration
    out = []
    for t in np.linspace(0.0, T, nsamples):
        if np.all(config.omegas(t) == 0):
            out.append((float(t), math.pi / 2))
        else:
            out.append((float(t), mixing_angles(config, float(t)).theta))
    return out
