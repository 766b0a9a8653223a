#pragma once

// Independent check of the Dicke-basis propagator for tiny ensembles: the
// schedule is replayed in the full 2^N product space with dense matrix
// exponentials, then projected back onto the symmetric subspace.

#include <optional>

#include "entamp/cavity.hpp"
#include "entamp/dicke.hpp"
#include "entamp/protocol.hpp"

namespace entamp {

inline constexpr int kOracleMaxAtoms = 4;

// Throws std::invalid_argument for N > kOracleMaxAtoms.
DickeState full_product_oracle(const CavityConfig& cfg, const ProtocolSchedule& schedule,
                               std::optional<DickeState> initial = std::nullopt,
                               const PropagationOptions& opts = {});

}  // namespace entamp
