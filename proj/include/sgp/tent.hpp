#pragma once

#include <cstddef>
#include <vector>

#include "sgp/core.hpp"

namespace sgp {

/// Finite-dimensional law of the random-measure process on a grid t_1 < ... < t_n.
///
/// The n tent sets split the plane into n(n+1)/2 bounded cells; cell (i, j)
/// (0-based, i <= j) is covered by exactly the tents of t_i..t_j and has area
/// mass(i, j). The value at t_k is the sum of the cells with i <= k <= j.
class TentPartition {
public:
    TentPartition(TimeGrid grid, std::vector<double> masses);

    const TimeGrid& grid() const { return grid_; }
    std::size_t size() const { return grid_.size(); }
    double mass(std::size_t i, std::size_t j) const { return masses_[index(i, j)]; }
    /// Upper-triangular masses, row-major over i then j >= i.
    const std::vector<double>& masses() const { return masses_; }

    std::size_t index(std::size_t i, std::size_t j) const {
        return i * size() - i * (i - 1) / 2 + (j - i);
    }

private:
    TimeGrid grid_;
    std::vector<double> masses_;
};

/// Inclusion-exclusion cell areas for tents whose pairwise overlap is
/// exp(-lambda |t - s|). Evaluated in the factorized form
/// e^{-lambda (t_j - t_i)} (1 - e^{-lambda (t_i - t_{i-1})}) (1 - e^{-lambda (t_{j+1} - t_j)}),
/// dropping the left/right factor at the grid boundary, so every mass is >= 0.
TentPartition tent_partition(const TimeGrid& grid, const Dependence& dep);

}  // namespace sgp
