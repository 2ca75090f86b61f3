#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace didipw {

// Thrown when input rows or arguments violate a structural requirement
// (non-binary indicators, missing fields, dimension mismatches).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when the data cannot support the two-group two-period design
// (an empty (d,t) cell, degenerate treatment assignment, ...).
struct DesignError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when an estimation step fails (separation, degenerate response,
// unstable bootstrap, zero denominators).
struct EstimationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Cell layout for the 2x2 design: index = 2*d + t.
//   0 = control-pre (0,0)   1 = control-post (0,1)
//   2 = treated-pre (1,0)   3 = treated-post (1,1)
constexpr std::size_t cell_index(int d, int t) noexcept {
    return static_cast<std::size_t>(2 * d + t);
}

constexpr std::size_t kCellControlPre = 0;
constexpr std::size_t kCellControlPost = 1;
constexpr std::size_t kCellTreatedPre = 2;
constexpr std::size_t kCellTreatedPost = 3;

inline std::string cell_name(std::size_t cell) {
    static const std::array<const char*, 4> names = {"(0,0)", "(0,1)", "(1,0)", "(1,1)"};
    return names.at(cell);
}

// Compensated (Kahan) accumulator. Keeps sums permutation-stable well below
// the 1e-12 tolerance the estimator contracts promise.
class KahanSum {
public:
    void add(double x) noexcept {
        const double y = x - comp_;
        const double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const noexcept { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace didipw
