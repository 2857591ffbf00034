#pragma once

// JSON renderings shared by the command line and the HTTP service.
// Rationals are rendered as strings so values stay exact.

#include "ddec/argument.hpp"
#include "ddec/model.hpp"

#include <json.hpp>

namespace ddec {

// {goal, verdict, partial, approximate, arguments[{id, conclusion, support,
// contingent_base, label}], edges[{attacker, target, point, kind}],
// rules[{id, schema, text}]}. Argument ids are "A<n>", n from 1 in pool order.
nlohmann::json trace_to_json(const DialecticTrace& trace);

// {verdict, act, contenders, fallback_used, partial, root_values, act_verdicts,
// summary}; with `traces`, also {traces: {act: trace}}.
nlohmann::json recommendation_to_json(const Recommendation& rec, bool traces = false);

nlohmann::json salient_to_json(const SalientModel& s);

const char* kind_name(RecommendationKind k);

}  // namespace ddec
