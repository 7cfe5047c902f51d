#pragma once

//! \file lattice.hpp
//! Directed boundary slices: nonnegative integer points x with |x|_1 = n.

#include <cstdint>
#include <span>
#include <vector>

namespace rwre
{

using Coords = std::vector<int>;

//! Number of compositions of n into d nonnegative parts, C(n+d-1, d-1).
std::uint64_t slice_size(int d, int n);

/*!
 * Dense bijection between the points of a slice and [0, size).
 *
 * Points are ordered lexicographically on (x_1, ..., x_{d-1}); the last
 * coordinate is determined by the others.
 */
class SliceIndexer
{
  public:
    SliceIndexer(int d, int n);

    int dim() const { return d_; }
    int level() const { return n_; }
    std::size_t size() const { return size_; }

    std::size_t index_of(std::span<const int> x) const;
    Coords point_of(std::size_t index) const;
    void point_of(std::size_t index, std::span<int> out) const;

    //! Advance x to the next point in index order; false past the end.
    static bool next(std::span<int> x);

  private:
    // Compositions of r into m nonnegative parts.
    std::uint64_t count(int m, int r) const;

    int d_;
    int n_;
    std::size_t size_;
    std::vector<std::uint64_t> binom_;  // (n + d + 1) x (d + 1)
};

//! Largest-remainder rounding of n*y to a point of slice n (ties: lowest index).
Coords round_to_slice(std::span<const double> y, int n);

//! log(n! / (x_1! ... x_d!)), the number of directed paths from 0 to x.
double multinomial_log_count(std::span<const int> x);

//! Validate a point of the boundary face (y >= 0, sum y = 1).
void check_boundary_direction(std::span<const double> y);

}  // namespace rwre
