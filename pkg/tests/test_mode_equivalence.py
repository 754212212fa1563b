"""Storage-mode interchangeability over long random op sequences."""

from hypothesis import given, settings
from hypothesis import strategies as st

from equivalence import run_equivalence_case


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1))
def test_modes_equivalent_over_1000_op_sequences(seed):
    stats = run_equivalence_case(seed, n_ops=1000)
    assert stats["ops"] == 1000
    # Sequences must actually exercise both halves of the oracle.
    assert stats["validates"] > 0
    assert stats["storage_ops"] > 0
