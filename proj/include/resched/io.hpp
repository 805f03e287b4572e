#pragma once

#include <string>

#include "resched/canonical_types.hpp"
#include "resched/finalround.hpp"
#include "resched/goodness.hpp"
#include "resched/instance.hpp"

namespace resched {

// Document formats (all JSON, rationals as "a/b" strings):
//   Instance:  {eps, machines:[ids], heavy:[{id, eligible:[...]}], light:[...]}
//   Schedule:  {"job_id": machine_id, ...}
//   Canonical: {machines:[ids], groups:[[machine ids]], w:[[h,k,"a/b"]...],
//               z:["a/b"...], p, q, theta}   (h, k and group entries are ids)
//   Witness:   {S:[ids], T:[ids], delta, slack}
// Parsers and writers round-trip losslessly.

std::string instance_to_json(const Instance& inst);
Instance instance_from_json(const std::string& text);

std::string schedule_to_json(const Schedule& sched);
Schedule schedule_from_json(const std::string& text);

std::string canonical_to_json(const CanonicalInstance& ci);
CanonicalInstance canonical_from_json(const std::string& text);

std::string assignment_to_json(const CanonicalInstance& ci,
                               const HeavyAssignment& f);
HeavyAssignment assignment_from_json(const CanonicalInstance& ci,
                                     const std::string& text);

std::string witness_to_json(const CanonicalInstance& ci, const Witness& w);

FinalConstants constants_from_json(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

bool looks_like_canonical_json(const std::string& text);

}  // namespace resched
