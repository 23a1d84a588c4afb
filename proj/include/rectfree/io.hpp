#pragma once

#include <string>

#include "rectfree/measures.hpp"

namespace rectfree {

// {"atoms":[[x,m],...],"grid":[...],"density":[...]}; doubles round-trip exactly.
std::string measure_json(const GriddedMeasure& mu);
// Loading enforces symmetry (and unit mass for probability measures).
SymmetricMeasure symmetric_measure_from_json(const std::string& text);
LevyMeasure levy_measure_from_json(const std::string& text);

// x,density rows on the grid.
std::string density_csv(const GriddedMeasure& mu);
std::string density_csv(const HalfLineMeasure& rho);
// {"atoms":[[x,m],...]}
std::string atoms_json(const GriddedMeasure& mu);
std::string atoms_json(const HalfLineMeasure& rho);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace rectfree
