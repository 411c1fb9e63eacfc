#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "c2f/numerics/tape.hpp"
#include "c2f/numerics/tensor.hpp"

namespace c2f::numerics {

// Differentiable primitives. Each records its output on `tape` and returns
// the handle. Masks are 0/1 float vectors over frames; a zero entry means the
// frame is padding and must not influence any value or gradient.

// input [T x D], kernel [K x D x H], bias [H] -> [T x H]. K must be odd.
Var conv1d_temporal(Tape& tape, Var input, Var kernel, Var bias);

// input [... x Din], weights [Din x Dout], bias [Dout] -> [... x Dout].
Var fully_connected(Tape& tape, Var input, Var weights, Var bias);

// Saturates at [FLT_MIN, 1 - 2^-24] so the output stays strictly inside (0, 1).
Var sigmoid(Tape& tape, Var x);
Var relu(Tape& tape, Var x);

// Mean of the k largest entries among valid frames (all valid entries if
// fewer than k). Ties go to the lower frame index. Throws ContractError on
// k == 0 or an empty mask.
Var topk_mean(Tape& tape, Var scores, std::span<const float> mask, std::size_t k);

// Column-wise topk_mean of a [T x C] score matrix -> [C].
Var topk_mean_columns(Tape& tape, Var scores, std::span<const float> mask, std::size_t k);

// Zeroes rows whose mask entry is 0. Works on [T] and [T x C].
Var mask_rows(Tape& tape, Var x, std::span<const float> mask);

// out[t, c] = matrix[t, c] * column[t]
Var scale_rows(Tape& tape, Var matrix, Var column);

// Entries below `threshold` become exactly 0 and stop their gradient;
// the rest pass through unchanged.
Var threshold(Tape& tape, Var x, float threshold);

Var reshape(Tape& tape, Var x, Shape shape);

// Mean binary cross-entropy over entries with weight > 0, probabilities
// clamped to [eps, 1 - eps]. Clamped entries get zero gradient. Returns 0
// when no entry is selected.
Var masked_bce(Tape& tape, Var probs, std::span<const float> targets,
               std::span<const float> weights, float eps = 1e-7f);

// sum(|x[t]|) over valid frames / number of valid frames (0 if none).
Var masked_abs_mean(Tape& tape, Var x, std::span<const float> mask);

// sum(|x[t+1] - x[t]|) over pairs of consecutive valid frames / pair count.
Var masked_total_variation(Tape& tape, Var x, std::span<const float> mask);

Var sum(Tape& tape, Var x);

// sum_i weight_i * term_i over scalar terms.
Var weighted_sum(Tape& tape, const std::vector<std::pair<float, Var>>& terms);

}  // namespace c2f::numerics
