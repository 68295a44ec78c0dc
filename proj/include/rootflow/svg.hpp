#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace rootflow::svg {

/// density (x,psi), histogram (r_lo,r_hi,mass,density), scatter (re,im) or
/// mass_series (t,mass,origin_flux).
std::vector<std::string> kinds();

/// Renders a CSV artifact as an 800x600 SVG. Axes have 10 major divisions
/// with 1-2-5 steps covering the data. Output depends only on the input text.
/// Throws SchemaMismatch when the header or a row does not fit the kind.
std::string render(std::string_view kind, std::istream& csv);

/// The smallest 1-2-5 step s with floor(lo/s)*s + 10 s >= hi.
double nice_step(double lo, double hi);

}  // namespace rootflow::svg
