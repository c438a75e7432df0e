#pragma once

#include <cmath>

namespace conewalk {

// Neumaier-compensated accumulator: adds are exact to ~1 ulp of the running
// sum regardless of magnitude ordering.
struct Kahan {
    double sum = 0.0;
    double comp = 0.0;

    void add(double v) {
        double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    void add(const Kahan& other) {
        add(other.sum);
        add(other.comp);
    }
    double value() const { return sum + comp; }
    void reset() { sum = comp = 0.0; }
};

}  // namespace conewalk
