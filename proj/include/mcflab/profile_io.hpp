#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "mcflab/grid.hpp"
#include "mcflab/translators.hpp"

namespace mcf {

/// Line-oriented profile table.
///
///   # kind=<kind> n=<n> b=<b> theta=<theta> residual_sup=<r> geometry=<g> ...
///   r,u            (interval and radial tables)
///   x1,x2,u        (slab tables, x1 outer, x2 inner)
///
/// All numbers are written with 17 significant digits so a write/read cycle
/// is bit-exact.
struct FieldTable {
  Field field;
  std::map<std::string, std::string> header;
};

void write_table(std::ostream& os, const Field& f,
                 const std::map<std::string, std::string>& header);
FieldTable read_table(std::istream& is);

void save_table(const std::string& path, const Field& f,
                const std::map<std::string, std::string>& header);
FieldTable load_table(const std::string& path);

/// Tabulated profiles only (bowl, tabulated). Closed-form profiles are sampled
/// onto `like` first by the caller.
void save_profile(const std::string& path, const TranslatorProfile& p);
TranslatorProfile load_profile(const std::string& path);

std::string format_double(double x);

}  // namespace mcf
