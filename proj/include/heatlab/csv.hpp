#pragma once

#include <string>
#include <vector>

namespace heatlab::csv {

/// Shortest representation that round-trips a double ("%.17g").
std::string number(double x);

std::vector<std::string> split(const std::string& line, char sep = ',');

double to_double(const std::string& field);
long long to_int(const std::string& field);

}  // namespace heatlab::csv
