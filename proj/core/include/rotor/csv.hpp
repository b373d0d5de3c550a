#pragma once

#include <initializer_list>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace rotor::csv {

/// 17 significant digits, '.' separator, locale independent.
std::string format(double value);

/// Writes one LF-terminated row; fields are emitted verbatim.
void write_row(std::ostream& out, const std::vector<std::string>& fields);
void write_row(std::ostream& out, std::initializer_list<std::string_view> fields);

}  // namespace rotor::csv
