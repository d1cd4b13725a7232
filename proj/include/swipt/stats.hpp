#pragma once

#include <span>
#include <vector>

namespace swipt {

// Ranks starting at 1; tied values share their average rank.
std::vector<double> average_ranks(std::span<const double> values);

double pearson(std::span<const double> x, std::span<const double> y);

// Pearson correlation of the average ranks. NaN if either side is constant.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace swipt
