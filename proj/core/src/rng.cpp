#include "hawkesim/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace hawkes {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline std::array<std::uint32_t, 4> philox_round(const std::array<std::uint32_t, 4>& c,
                                                 const std::array<std::uint32_t, 2>& k) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, c[0], hi0, lo0);
    mulhilo(kPhiloxM1, c[2], hi1, lo1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> Philox4x32::block(const std::array<std::uint32_t, 4>& counter,
                                               const std::array<std::uint32_t, 2>& key) {
    std::array<std::uint32_t, 4> c = counter;
    std::array<std::uint32_t, 2> k = key;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            k[0] += kPhiloxW0;
            k[1] += kPhiloxW1;
        }
        c = philox_round(c, k);
    }
    return c;
}

std::uint64_t make_stream_id(StreamPurpose purpose, std::uint64_t context, std::uint64_t index) {
    if (context >= (1ull << 16)) throw std::invalid_argument("stream context out of range");
    if (index >= (1ull << 40)) throw std::invalid_argument("stream index out of range");
    return (static_cast<std::uint64_t>(purpose) << 56) | (context << 40) | index;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      stream_{static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)} {}

RngStream::RngStream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t context,
                     std::uint64_t index)
    : RngStream(seed, make_stream_id(purpose, context, index)) {}

void RngStream::refill() {
    const std::array<std::uint32_t, 4> counter = {
        static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
        stream_[0], stream_[1]};
    buffer_ = Philox4x32::block(counter, key_);
    ++block_;
    buffer_pos_ = 0;
}

std::uint64_t RngStream::next_u64() {
    if (buffer_pos_ > 2) refill();
    const std::uint64_t lo = buffer_[buffer_pos_];
    const std::uint64_t hi = buffer_[buffer_pos_ + 1];
    buffer_pos_ += 2;
    return lo | (hi << 32);
}

double RngStream::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform01_open_left() {
    return 1.0 - uniform01();
}

double RngStream::uniform01_open() {
    return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
}

double RngStream::exponential(double rate) {
    if (!(rate > 0.0)) throw std::invalid_argument("exponential rate must be > 0");
    return -std::log(uniform01_open_left()) / rate;
}

double RngStream::normal() {
    if (has_spare_normal_) {
        has_spare_normal_ = false;
        return spare_normal_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform01() - 1.0;
        v = 2.0 * uniform01() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_normal_ = v * f;
    has_spare_normal_ = true;
    return u * f;
}

double RngStream::normal(double mean, double stddev) {
    return mean + stddev * normal();
}

std::uint64_t RngStream::poisson(double mean) {
    if (!(mean >= 0.0)) throw std::invalid_argument("poisson mean must be >= 0");
    // Halving keeps the product method's running product away from the
    // double underflow threshold (exp(-745)).
    if (mean > 500.0) {
        const double half = 0.5 * mean;
        return poisson(half) + poisson(mean - half);
    }
    const double limit = std::exp(-mean);
    std::uint64_t n = 0;
    double product = uniform01_open_left();
    while (product > limit) {
        ++n;
        product *= uniform01_open_left();
    }
    return n;
}

}  // namespace hawkes
