"""A walking tour of the LSTM cell and its gradients.

Run:  python demos/01_lstm_cell.py
"""

import numpy as np

from vrboost.lstm import (LstmState, forward_sequence, forward_step,
                          grad_check, init_params, param_keys)
from vrboost.numerics import Rng

# ---------------------------------------------------------------------------
# 1. With every weight at zero the cell is perfectly agnostic: the sigmoid
#    gates all emit 0.5, the candidate vector is 0, and the state stays put.
params = init_params(input_dim=3, hidden_dim=2, rng=Rng(0))
for key in param_keys():
    params.arrays[key] = np.zeros_like(params.arrays[key])

state, record = forward_step(params, np.array([1.0, -2.0, 0.5]),
                             LstmState(np.zeros(2), np.zeros(2)))
print("zero-weight gates:")
for gate in ("forget", "input", "output", "candidate"):
    print(f"  {gate:<10} -> {record.gate[gate]}")
print("  new cell state  ->", state.c)

# ---------------------------------------------------------------------------
# 2. The forget gate really does decide what survives. Saturate it open
#    (bias +50) and the cell value passes through untouched; slam the input
#    gate shut (bias -50) and nothing new gets in.
params.arrays["b_forget"] = np.full(2, 50.0)
params.arrays["b_input"] = np.full(2, -50.0)
keep, _ = forward_step(params, np.array([9.0, 9.0, 9.0]),
                       LstmState(np.zeros(2), np.array([0.7, -0.3])))
print("\nsaturated forget-open / input-shut, cell [0.7, -0.3] ->", keep.c)

# ---------------------------------------------------------------------------
# 3. A small random cell driving the sigmoid head: probabilities live
#    strictly inside (0, 1) and the full forward trace is kept for training.
rng = Rng(42)
params = init_params(input_dim=3, hidden_dim=4, rng=rng)
sequence = [rng.uniform_array((3,), -1, 1) for _ in range(5)]
prob, cache = forward_sequence(params, sequence)
print(f"\n5-step sequence -> class-1 probability {prob:.4f} "
      f"({len(cache.steps)} steps cached)")

# ---------------------------------------------------------------------------
# 4. The backward pass is exact. Compare every parameter's gradient against
#    central finite differences: the worst relative error is tiny, and
#    deliberately zeroing one gate's gradient is caught immediately.
err = grad_check(params, sequence, y=1, w=1.0)
broken = grad_check(params, sequence, y=1, w=1.0, break_gate="candidate")
print(f"\ngradient check: healthy {err:.2e}, candidate gate zeroed {broken:.2e}")
