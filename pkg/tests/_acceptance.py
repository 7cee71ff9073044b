"""Shared log of acceptance-criterion results, printed at the end of the pytest run."""
import time
from contextlib import contextmanager

RESULTS = []


@contextmanager
def criterion(number, title):
    """Yields a dict; the body sets ``ok`` and ``detail``.  One line is logged either way."""
    state = {"ok": False, "detail": ""}
    start = time.perf_counter()
    try:
        yield state
    except BaseException as e:
        state["ok"] = False
        state["detail"] = f"{type(e).__name__}: {e}"
        raise
    finally:
        line = (f"criterion {number:2d} {'PASS' if state['ok'] else 'FAIL'}  {title}"
                f"  [{time.perf_counter() - start:.1f}s]  {state['detail']}")
        RESULTS.append((number, line))
        print(line)
    assert state["ok"], state["detail"]
