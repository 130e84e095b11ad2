"""Collects one PASS/FAIL line per acceptance criterion."""

import contextlib
import time

LINES: list[str] = []


@contextlib.contextmanager
def criterion(label: str, detail: str = ""):
    info = {"detail": detail}
    start = time.perf_counter()
    try:
        yield info
    except BaseException:
        LINES.append(f"FAIL  {label}  {info['detail']}  ({time.perf_counter() - start:.1f} s)")
        raise
    LINES.append(f"PASS  {label}  {info['detail']}  ({time.perf_counter() - start:.1f} s)")
