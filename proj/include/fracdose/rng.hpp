#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace fracdose {

// Single pinned PRNG stream (std::mt19937_64) with hand-rolled draw
// functions, so identical seeds give identical sequences on every platform
// and standard library. Training consumes this stream in a documented
// order: network init, then per env step the epsilon test (plus one draw
// for a random action), then per gradient step the batch indices.
class Rng {
  public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t raw() { return gen_(); }

    // uniform in [0, 1), 53 mantissa bits
    double unif01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // uniform in [a, b)
    double uniform(double a, double b) { return a + (b - a) * unif01(); }

    // unbiased uniform integer in [0, n) via rejection
    int uniform_int(int n) {
        const uint64_t bound = n;
        const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return static_cast<int>(x % bound);
    }

    std::string save_state() const;
    void load_state(const std::string& text);

  private:
    std::mt19937_64 gen_;
};

}  // namespace fracdose
