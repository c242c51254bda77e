"""State command: amplitudes of the named states."""

import numpy as np

from dickesim.commands import reported_errors
from dickesim.quantum.states import NAMED_STATES, named_state
from dickesim.utils.formatter import format_amplitude, format_output


def show_state(name: str, fmt: str = "pretty", tol: float = 1e-12) -> None:
    with reported_errors("building state"):
        state = named_state(name)

    n = state.num_qubits
    rows = [
        {"name": f"|{index:0{n}b}>", "amplitude": format_amplitude(complex(state.amplitudes[index]))}
        for index in np.flatnonzero(np.abs(state.amplitudes) > tol)
    ]
    print(format_output(rows, fmt))


def list_states(fmt: str = "pretty") -> None:
    rows = []
    for name in NAMED_STATES:
        state = named_state(name)
        support = int(np.count_nonzero(np.abs(state.amplitudes) > 1e-12))
        rows.append({"name": name, "qubits": state.num_qubits, "support": support})
    print(format_output(rows, fmt))
