#pragma once

#include <cstdint>
#include <vector>

namespace ilrip {

enum class Algorithm : std::uint8_t { regular = 0, ilr = 1 };

// Encoder-side record of one block decision, for instrumentation.
struct BlockDecision {
  std::vector<double> candidate_costs;  // every branch evaluated, in evaluation order
  int chosen = 0;                       // index into candidate_costs
  double chosen_cost = 0.0;
  double rate_bits = 0.0;               // committed rate of the block's syntax
  Algorithm algorithm = Algorithm::regular;
};

struct EncodeTrace {
  std::vector<BlockDecision> blocks;
};

}  // namespace ilrip
