#pragma once

// JSON forms of states, protocols, optimizer configs and reports.

#include <json.hpp>

#include "entacc/accounting.hpp"
#include "entacc/protocols.hpp"

namespace entacc {

using Json = nlohmann::ordered_json;

/// {"layout": {party: [dims]}, "amplitudes": [[re, im], ...]}.
Json state_to_json(const PureState& state);
/// Accepts the literal form above or {"name": ..., "params": [...],
/// "labels": [...]} for make_named_state.
PureState state_from_json(const Json& j, std::size_t max_dim = kDefaultMaxDim);

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json protocol_to_json(const Protocol& p);
Protocol protocol_from_json(const Json& j, std::size_t max_dim = kDefaultMaxDim);

Json config_to_json(const OptimizerConfig& c);
/// Missing keys keep their defaults; unknown keys are rejected.
OptimizerConfig config_from_json(const Json& j);

Json ree_to_json(const REEResult& r);
Json bracket_to_json(const ReeBracket& b);
Json ledger_to_json(const LedgerReport& report, bool with_branches = true);
Json audit_to_json(const ProtocolAudit& audit);
Json profile_to_json(const EntropyProfile& p);
Json rates_to_json(const ExtractionSolution& s);
Json matching_to_json(const SingletMatchingResult& m);
Json concentration_to_json(const std::vector<ConcentrationOutcome>& outcomes);
Json ghz_scan_to_json(const GhzScanReport& r);

}  // namespace entacc
