"""Hot single-pass kernels for the event state machine.

The same function body runs two ways: JIT-compiled with numba (default) or as
plain Python over the same numpy arrays. Set ``INTRINSIC_NO_NUMBA=1`` to force
the plain path (it is also used automatically when numba is not importable).
Both paths execute identical floating-point operations in identical order, so
their outputs are bit-for-bit equal; the flag trades speed only, never bytes.

``dissect_core_py`` always refers to the uncompiled body so the benchmark can
compare backends within one process.
"""

from __future__ import annotations

import math
import os

import numpy as np

MODE_UNSET = 0
MODE_UP = 1
MODE_DOWN = -1
KIND_DC = 0
KIND_OS = 1


def _dissect_core(
    time_ms,
    price,
    threshold,
    use_log,
    collect,
    ev_kind,
    ev_mode,
    ev_time,
    ev_price,
    ev_tick,
    sg_kind,
    sg_start_price,
    sg_start_time,
    sg_end_price,
    sg_end_time,
    sg_magnitude,
):
    """One pass of the directional-change / overshoot state machine.

    Before the first directional change the reference price is the first
    sample, fixed; the first event fires when the move from it reaches the
    threshold in either direction. Afterwards the reference is the running
    extremum (high in up mode, low in down mode). Overshoot events chain from
    the last event's observed trigger price; each one requires a fresh
    threshold-sized move along the mode. All trigger comparisons are
    inclusive (>= threshold).

    Closed segments tile the path between reference points: a
    directional-change segment runs extremum -> trigger (so its magnitude is
    >= threshold by construction), an overshoot segment runs trigger -> next
    extremum. When ``collect`` is false the output arrays are never written
    (callers may pass empty dummies) and only the counters are maintained.

    Returns ``(n_events, n_segments, n_dc, os_sum, os_count, mode,
    extremum, extremum_time, last_dc_price, last_dc_time, last_event_price)``.
    """
    n = price.shape[0]
    n_ev = 0
    n_sg = 0
    n_dc = 0
    os_sum = 0.0
    os_count = 0
    mode = 0
    if n == 0:
        return (0, 0, 0, 0.0, 0, 0, 0.0, 0, 0.0, 0, 0.0)
    h = threshold
    ref = price[0]
    ref_time = time_ms[0]
    last_dc = 0.0
    last_dc_time = 0
    last_event = 0.0
    for i in range(1, n):
        p = price[i]
        t = time_ms[i]
        if mode == 0:
            if use_log:
                m = math.log(p / ref)
            else:
                m = (p - ref) / ref
            if m >= h or m <= -h:
                d = 1 if m > 0.0 else -1
                if collect:
                    ev_kind[n_ev] = KIND_DC
                    ev_mode[n_ev] = d
                    ev_time[n_ev] = t
                    ev_price[n_ev] = p
                    ev_tick[n_ev] = i
                n_ev += 1
                n_dc += 1
                if collect:
                    sg_kind[n_sg] = KIND_DC
                    sg_start_price[n_sg] = ref
                    sg_start_time[n_sg] = ref_time
                    sg_end_price[n_sg] = p
                    sg_end_time[n_sg] = t
                    sg_magnitude[n_sg] = abs(m)
                n_sg += 1
                mode = d
                ref = p
                ref_time = t
                last_dc = p
                last_dc_time = t
                last_event = p
        else:
            if mode > 0:
                if p > ref:
                    ref = p
                    ref_time = t
            else:
                if p < ref:
                    ref = p
                    ref_time = t
            if use_log:
                m = math.log(p / last_event)
            else:
                m = (p - last_event) / last_event
            if (mode > 0 and m >= h) or (mode < 0 and m <= -h):
                if collect:
                    ev_kind[n_ev] = KIND_OS
                    ev_mode[n_ev] = mode
                    ev_time[n_ev] = t
                    ev_price[n_ev] = p
                    ev_tick[n_ev] = i
                n_ev += 1
                last_event = p
            if use_log:
                r = math.log(p / ref)
            else:
                r = (p - ref) / ref
            if (mode > 0 and r <= -h) or (mode < 0 and r >= h):
                if use_log:
                    g = math.log(ref / last_dc)
                else:
                    g = (ref - last_dc) / last_dc
                og = abs(g)
                if collect:
                    sg_kind[n_sg] = KIND_OS
                    sg_start_price[n_sg] = last_dc
                    sg_start_time[n_sg] = last_dc_time
                    sg_end_price[n_sg] = ref
                    sg_end_time[n_sg] = ref_time
                    sg_magnitude[n_sg] = og
                n_sg += 1
                os_sum += og
                os_count += 1
                nm = -mode
                if collect:
                    ev_kind[n_ev] = KIND_DC
                    ev_mode[n_ev] = nm
                    ev_time[n_ev] = t
                    ev_price[n_ev] = p
                    ev_tick[n_ev] = i
                n_ev += 1
                n_dc += 1
                if collect:
                    sg_kind[n_sg] = KIND_DC
                    sg_start_price[n_sg] = ref
                    sg_start_time[n_sg] = ref_time
                    sg_end_price[n_sg] = p
                    sg_end_time[n_sg] = t
                    sg_magnitude[n_sg] = abs(r)
                n_sg += 1
                mode = nm
                ref = p
                ref_time = t
                last_dc = p
                last_dc_time = t
                last_event = p
    return (
        n_ev,
        n_sg,
        n_dc,
        os_sum,
        os_count,
        mode,
        ref,
        ref_time,
        last_dc,
        last_dc_time,
        last_event,
    )


def _env_disables_numba() -> bool:
    return os.environ.get("INTRINSIC_NO_NUMBA", "").strip().lower() not in (
        "",
        "0",
        "false",
    )


dissect_core_py = _dissect_core

USING_NUMBA = False
if not _env_disables_numba():
    try:
        from numba import njit

        dissect_core = njit(cache=True, nogil=True)(_dissect_core)
        USING_NUMBA = True
    except ImportError:
        dissect_core = _dissect_core
else:
    dissect_core = _dissect_core


_EMPTY_U8 = np.empty(0, dtype=np.uint8)
_EMPTY_I8 = np.empty(0, dtype=np.int8)
_EMPTY_I64 = np.empty(0, dtype=np.int64)
_EMPTY_F64 = np.empty(0, dtype=np.float64)


def run_dissection(time_ms: np.ndarray, price: np.ndarray, threshold: float, use_log: bool):
    """Run the kernel collecting events and segments.

    Returns ``(events, segments, state)`` where ``events`` is a tuple of
    right-sized arrays ``(kind, mode, time, price, tick)``, ``segments`` is
    ``(kind, start_price, start_time, end_price, end_time, magnitude)`` and
    ``state`` is the kernel's trailing-state tuple.
    """
    n = price.shape[0]
    ev_kind = np.empty(n, dtype=np.uint8)
    ev_mode = np.empty(n, dtype=np.int8)
    ev_time = np.empty(n, dtype=np.int64)
    ev_price = np.empty(n, dtype=np.float64)
    ev_tick = np.empty(n, dtype=np.int64)
    n_sg_max = 2 * n
    sg_kind = np.empty(n_sg_max, dtype=np.uint8)
    sg_start_price = np.empty(n_sg_max, dtype=np.float64)
    sg_start_time = np.empty(n_sg_max, dtype=np.int64)
    sg_end_price = np.empty(n_sg_max, dtype=np.float64)
    sg_end_time = np.empty(n_sg_max, dtype=np.int64)
    sg_magnitude = np.empty(n_sg_max, dtype=np.float64)
    out = dissect_core(
        time_ms,
        price,
        threshold,
        use_log,
        True,
        ev_kind,
        ev_mode,
        ev_time,
        ev_price,
        ev_tick,
        sg_kind,
        sg_start_price,
        sg_start_time,
        sg_end_price,
        sg_end_time,
        sg_magnitude,
    )
    n_ev, n_sg = out[0], out[1]
    events = (
        ev_kind[:n_ev].copy(),
        ev_mode[:n_ev].copy(),
        ev_time[:n_ev].copy(),
        ev_price[:n_ev].copy(),
        ev_tick[:n_ev].copy(),
    )
    segments = (
        sg_kind[:n_sg].copy(),
        sg_start_price[:n_sg].copy(),
        sg_start_time[:n_sg].copy(),
        sg_end_price[:n_sg].copy(),
        sg_end_time[:n_sg].copy(),
        sg_magnitude[:n_sg].copy(),
    )
    return events, segments, out


def run_counts(time_ms: np.ndarray, price: np.ndarray, threshold: float, use_log: bool):
    """Run the kernel without materializing events or segments.

    Returns the kernel's state tuple; the interesting parts are
    ``n_dc = state[2]``, ``os_sum = state[3]`` and ``os_count = state[4]``.
    """
    return dissect_core(
        time_ms,
        price,
        threshold,
        use_log,
        False,
        _EMPTY_U8,
        _EMPTY_I8,
        _EMPTY_I64,
        _EMPTY_F64,
        _EMPTY_I64,
        _EMPTY_U8,
        _EMPTY_F64,
        _EMPTY_I64,
        _EMPTY_F64,
        _EMPTY_I64,
        _EMPTY_F64,
    )
