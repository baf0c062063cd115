#pragma once

#include <span>
#include <vector>

inline std::vector<double> to_vector(std::span<const double> s) { return {s.begin(), s.end()}; }
