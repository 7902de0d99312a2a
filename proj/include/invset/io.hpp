#pragma once

#include "invset/analysis.hpp"
#include "invset/backward.hpp"
#include "invset/estimates.hpp"
#include "invset/flow.hpp"
#include "invset/forward.hpp"
#include "invset/manifold.hpp"
#include "invset/rate.hpp"

#include <json.hpp>

#include <string>

namespace invset {

using Json = nlohmann::json;

/// Shortest text that reads back to the same double ("%.17g").
std::string format_double(double x);

/// CSV with header t,x1..xM, one row per sample.
void write_trajectory_csv(const std::string& path, const Trajectory& traj);
Trajectory read_trajectory_csv(const std::string& path);

/// CSV with header x1..xM, one row per column of `points`.
void write_points_csv(const std::string& path, const Matrix& points);

/// Writes `<stem>.csv` (p1..pN,q1..qK, plus branch_id for graph_Phi) and
/// `<stem>.json` with label, time, grid_meta, problem hash and node indices.
void write_manifold(const std::string& stem, const SampledManifold& m);
SampledManifold read_manifold(const std::string& stem);

Json to_json(const Vector& v);
Json to_json(const GridMeta& g);
Json to_json(const RateConstants& c);
Json to_json(const RateReport& r);
Json to_json(const SigmaRhoReport& r);
Json to_json(const BackwardBoundsReport& r);
Json to_json(const LipschitzEstimate& e);
Json to_json(const ForwardInvariantReport& r);
Json to_json(const ContainmentReport& r);
Json to_json(const InclusionReport& r);
Json to_json(const ClosednessReport& r);
Json to_json(const PhiValue& v);

/// Writes `j` with two-space indentation and a trailing newline.
void write_json(const std::string& path, const Json& j);

}  // namespace invset
