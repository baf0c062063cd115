#pragma once

#include <cmath>

namespace gof {

// Neumaier's variant of Kahan summation. Handles addends larger than the
// running sum, which plain Kahan does not.
class NeumaierSum {
public:
    NeumaierSum() = default;
    NeumaierSum(double sum, double compensation) : sum_(sum), comp_(compensation) {}

    void add(double x) {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    void add(const NeumaierSum& other) {
        add(other.sum_);
        add(other.comp_);
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace gof
