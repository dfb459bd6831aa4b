#pragma once

// JSON views of result structs. Field names are the on-disk schema.

#include "normgeo/compatibility.hpp"
#include "normgeo/conditions.hpp"
#include "normgeo/geometry.hpp"
#include "normgeo/json_io.hpp"
#include "normgeo/regparam.hpp"
#include "normgeo/solver.hpp"

namespace normgeo {

Json to_json(const WidthEstimate& w);
Json to_json(const ConditionReport& r);
Json to_json(const EnvelopeFit& f);
Json to_json(const LambdaReport& r);
Json to_json(const SandwichReport& r);
Json to_json(const CompatibilityEstimate& c);
Json to_json(const FitResult& f);
Json to_json(const GlmCurvature& c);

Json vector_json(const Vector& v);

// Caps the OpenMP team size; n <= 0 means all available processors.
// Nested regions are disabled so the team layout is the same at every level.
void set_thread_count(int n);
int thread_count();

}  // namespace normgeo
