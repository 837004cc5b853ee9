import pytest

from annealer_audit.ising import IsingInstance, random_instance

ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)


@pytest.fixture
def acceptance_log(request):
    """Callable ``log(number, passed, detail)`` collecting one line per criterion."""
    lines = request.config.stash[ACCEPTANCE_KEY]

    def log(number, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {detail}"
        lines.append(line)
        print(line)

    return log


@pytest.fixture
def ferromagnet():
    return IsingInstance(2, {(0, 1): -1.0})


@pytest.fixture
def triangle():
    return IsingInstance(3, {(0, 1): 1.0, (0, 2): 1.0, (1, 2): 1.0})


@pytest.fixture
def small_instance():
    return random_instance(8, "full", 0.0, 1.0, 0.5, seed=3)
