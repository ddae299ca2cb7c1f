import numpy as np
import pytest

from dpass.modem_tx import TxConfig, modulate
from dpass.protocol import encode_packet


def clean_packet_db(symbols, on_db=20.0, floor_db=0.0):
    """Noise-free RSSI of a modulated packet over a constant floor."""
    tr = modulate(symbols, TxConfig(on_power_db=on_db))
    on = np.isfinite(tr.power_db)
    return np.where(on, 10 * np.log10(10 ** (on_db / 10) + 10 ** (floor_db / 10)), floor_db)


@pytest.fixture
def example_symbols():
    return encode_packet(50, 5890, 10)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record one pass/fail line per acceptance criterion for the terminal summary."""

    def record(label: str, ok: bool, detail: str = ""):
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}".rstrip())
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
