import os

THREADS_ENV = "ANNEALER_AUDIT_THREADS"


def worker_count() -> int:
    """Worker cap from ``ANNEALER_AUDIT_THREADS`` (default 1, malformed values ignored)."""
    raw = os.environ.get(THREADS_ENV)
    try:
        return max(1, int(raw)) if raw else 1
    except ValueError:
        return 1
