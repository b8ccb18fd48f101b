#pragma once

#include "hroa/prefix.hpp"

#include <iosfwd>
#include <vector>

namespace hroa {

/// Reads `asn,prefix/len,max_length` rows. A leading header line is skipped,
/// the ASN may carry an "AS" prefix, an empty max_length means the prefix
/// length, and extra trailing columns (e.g. a trust anchor) are ignored.
/// Blank lines and lines starting with '#' are skipped.
/// Throws ParseError carrying the 1-based line number.
std::vector<Vrp> read_vrp_csv(std::istream &in, HostBits mode = HostBits::lenient);

/// Writes rows in the same format, with a header line.
void write_vrp_csv(std::ostream &out, const std::vector<Vrp> &rows);

} // namespace hroa
