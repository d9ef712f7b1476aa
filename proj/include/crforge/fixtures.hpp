#pragma once

#include <string>
#include <vector>

#include "io.hpp"

namespace crforge {

/* Built-in example files: five manifolds and seven maps at truncation 8,
 * stored as canonical file text (the emission of the constructed objects),
 * together with a frozen verdict table that serves as a regression oracle
 * for the whole pipeline. */
struct FixtureEntry {
    std::string name;
    std::string kind;    /* "manifold" or "map" */
    std::string source;  /* maps only: source manifold fixture */
    std::string target;  /* maps only: target manifold fixture */
    std::string text;    /* canonical file contents */
};

const std::vector<FixtureEntry>& fixture_registry();
const FixtureEntry* find_fixture(const std::string& name);

/* One verdict line per fixture, computed live.  Manifolds report finite
 * type, essential finiteness (with a curve witness when undetermined), and
 * the Segre identity check; maps report the sends-into verdict against
 * their source/target manifolds and the injectivity of the induced
 * substitution homomorphism. */
std::string fixture_verdict_line(const FixtureEntry& e, uint64_t seed);

/* the full table, one line per registry entry, trailing newline */
std::string fixtures_table(uint64_t seed);

/* the frozen expected table (computed at seed 17) */
std::string fixtures_golden();

struct FixtureRun {
    bool match = false;
    std::vector<std::string> lines; /* computed lines, registry order */
    std::string diff;               /* empty when everything matches */
};

/* selection: "all" or a single fixture name; throws on unknown names */
FixtureRun fixtures_run(const std::string& selection, uint64_t seed);

}  // namespace crforge
