#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>

#include "entropylab/grid_density.hpp"
#include "entropylab/lattice_pmf.hpp"

// Text formats. Lines starting with '#' and blank lines are ignored.
//
//   pmf:      one atom per line, "x1 ... xd : mass"
//   cyclic:   header "cyclic k n", then "r1 ... rn : mass"
//   density:  header "grid d k lo1 hi1 ... lod hid" (cell ranges [lo, hi)),
//             then "c1 ... cd : value" for nonzero cells
namespace entropylab::io {

LatticePMF parse_pmf(std::string_view text);
CyclicPMF parse_cyclic(std::string_view text);
GridDensity parse_density(std::string_view text);

/// Masses are written with 17 significant digits so that reading back gives
/// identical doubles.
void write_pmf(std::ostream& out, const LatticePMF& p);
void write_cyclic(std::ostream& out, const CyclicPMF& p);
void write_density(std::ostream& out, const GridDensity& f);

using Distribution = std::variant<LatticePMF, CyclicPMF, GridDensity>;

/// Dispatches on the first meaningful line of the text.
Distribution parse_distribution(std::string_view text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

/// Generator strings such as "gaussian:mean=0,var=1,N=8,k=8",
/// "uniform:lo=0,hi=1,k=10", "power:p=1,k=14", "triangular:lo=0,hi=2,k=8",
/// "pmf:0.25,0.5,0.25" or "uniform-int:n=4". Anything else is read as a file.
Distribution load_distribution(const std::string& spec);

bool is_generator(const std::string& spec);

}  // namespace entropylab::io
