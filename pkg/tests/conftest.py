import numpy as np
import pytest

from flyembed.ingest import read_idx_images, take_subset, write_idx_images

ACCEPTANCE_RESULTS = []


def record(criterion, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
    ACCEPTANCE_RESULTS.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def mnist_idx(tmp_path_factory):
    """The 5000-image MNIST sample bundled with mlxtend, written out as an IDX file."""
    try:
        from mlxtend.data import mnist_data
    except ImportError:  # pragma: no cover
        pytest.fail("mlxtend is required for the MNIST checks: pip install -e '.[test]'")
    X, _ = mnist_data()
    path = tmp_path_factory.mktemp("mnist") / "mnist-5k-images-idx3-ubyte"
    write_idx_images(path, X.reshape(-1, 28, 28).astype(np.uint8))
    return path


@pytest.fixture(scope="session")
def mnist_2000(mnist_idx):
    return take_subset(read_idx_images(mnist_idx), 2000, "first_n")
