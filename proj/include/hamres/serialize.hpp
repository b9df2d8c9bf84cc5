#pragma once

#include <iosfwd>
#include <span>

#include <json.hpp>

#include "hamres/adversary.hpp"
#include "hamres/experiment.hpp"
#include "hamres/hamilton.hpp"
#include "hamres/matching.hpp"
#include "hamres/structure.hpp"

namespace hamres {

using Json = nlohmann::json;

void to_json(Json& j, const VertexSet& s);
void to_json(Json& j, const PropertyCheck& c);
void to_json(Json& j, const Classification& c);
void to_json(Json& j, const ScatterReport& r);
void to_json(Json& j, const Budget& b);
void to_json(Json& j, const StageOutcome& s);
void to_json(Json& j, const PipelineReport& r);
void to_json(Json& j, const SearchReport& r);
void to_json(Json& j, const SearchResult& r);
void to_json(Json& j, const TrialRecord& r);
void to_json(Json& j, const RateEstimate& r);
void to_json(Json& j, const Summary& s);
void to_json(Json& j, const SweepRow& r);
void to_json(Json& j, const ExperimentConfig& c);

// Unknown keys and out-of-range values raise ConfigError.
ExperimentConfig config_from_json(const Json& j);

// Budget descriptor: mode and parameters, without the per-vertex caps.
Json budget_descriptor(const Budget& b);

// Edge-list files (same format as graphs) for plans and matchings.
void write_edges(std::ostream& out, std::size_t n, std::span<const Edge> edges);
// One vertex id per line, in cycle order.
void write_cycle(std::ostream& out, std::span<const Vertex> cycle);

}  // namespace hamres
