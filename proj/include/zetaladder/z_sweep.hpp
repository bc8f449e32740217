#pragma once

#include <cstdint>
#include <vector>

namespace zl {

// Evaluates Z(t) along an arithmetic progression t_j = start + j * step.
//
// Each main-sum term n^{-1/2} e^{-i t ln n} is advanced by one complex
// multiplication per step instead of a fresh cos/log, and the whole state is
// re-seeded from direct evaluation every kReseedInterval steps to bound the
// drift. Terms are appended lazily as floor(tau(t)) grows. Not thread-safe;
// use one sweep per thread.
class ZSweep {
public:
    static constexpr int kReseedInterval = 256;

    ZSweep(double start, double step, bool corrected = true);

    double position() const noexcept { return t_; }
    // Z at the current position, then advance by one step.
    double next();

private:
    void reseed();
    void grow_to(std::int64_t n_terms);

    double start_;
    double step_;
    bool corrected_;
    std::int64_t index_ = 0;
    double t_;
    int since_reseed_ = 0;
    std::vector<double> re_, im_;          // n^{-1/2} e^{-i t ln n}
    std::vector<double> rot_re_, rot_im_;  // e^{-i step ln n}
};

}  // namespace zl
