#pragma once

#include "nijlin/brjuno/brjuno.hpp"
#include "nijlin/series/io.hpp"

namespace nijlin {

/// `{notation, kind, sign, a0, quotients, convergents}` with up to `depth`
/// quotients and convergents (exact integers as decimal strings).
Json cf_to_json(const ContinuedFraction& cf, std::size_t depth);

Json partial_sums_to_json(const std::vector<BrjunoPartialSum>& sums);
Json certificate_to_json(const BrjunoCertificate& cert);
Json sigma_to_json(const SigmaFlags& flags);
Json alpha_to_json(const Alpha& a);

}  // namespace nijlin
