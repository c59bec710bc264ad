// SPDX-License-Identifier: Apache-2.0
//! \file pbm/rng.hpp
//! Counter-based random streams (Philox4x32-10).
#pragma once

#include <array>
#include <cstdint>
#include <cmath>
#include <numbers>
#include <span>

namespace pbm
{
//---------------------------------------------------------------------------//
using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

// Ten-round Philox 4x32 bijection
inline PhiloxBlock philox4x32(PhiloxBlock counter, PhiloxKey key);

//---------------------------------------------------------------------------//
/*!
 * Reproducible stream addressed by (seed, stream id, counter).
 *
 * The 128-bit Philox counter holds the 64-bit block index in its low words and
 * the 64-bit stream id in its high words; the seed is the key. Draws are a
 * pure function of the address, so a stream can be repositioned anywhere.
 */
class RngStream
{
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : seed_(seed), stream_(stream_id)
    {
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_; }
    std::uint64_t counter() const { return counter_; }

    //! Jump to a block index; discards any buffered values
    void seek(std::uint64_t block)
    {
        counter_ = block;
        buffered_ = 0;
        has_normal_ = false;
    }

    std::uint64_t next_u64();
    //! Uniform on the open interval (0, 1) with 53-bit resolution
    double uniform();
    double normal();
    //! Fill with i.i.d. standard normals
    void normals(std::span<double> out);

  private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_{0};
    std::array<std::uint64_t, 2> words_{};
    int buffered_{0};
    double spare_normal_{0};
    bool has_normal_{false};
};

//---------------------------------------------------------------------------//
//! Stream id layout: generation (24 bits) | purpose (2 bits) | path (38 bits)
enum class StreamPurpose : std::uint64_t
{
    initial = 0,
    noise = 1,
    auxiliary = 2
};

inline std::uint64_t make_stream_id(std::uint64_t path,
                                    StreamPurpose purpose,
                                    std::uint32_t generation)
{
    return (static_cast<std::uint64_t>(generation & 0xFFFFFFu) << 40)
           | (static_cast<std::uint64_t>(purpose) << 38)
           | (path & ((std::uint64_t{1} << 38) - 1));
}

//---------------------------------------------------------------------------//
namespace detail
{
constexpr std::uint32_t philox_m0 = 0xD2511F53u;
constexpr std::uint32_t philox_m1 = 0xCD9E8D57u;
constexpr std::uint32_t philox_w0 = 0x9E3779B9u;
constexpr std::uint32_t philox_w1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo)
{
    std::uint64_t const prod = std::uint64_t{a} * b;
    hi = static_cast<std::uint32_t>(prod >> 32);
    lo = static_cast<std::uint32_t>(prod);
}
}  // namespace detail

//---------------------------------------------------------------------------//
inline PhiloxBlock philox4x32(PhiloxBlock ctr, PhiloxKey key)
{
    for (int round = 0; round < 10; ++round)
    {
        std::uint32_t hi0, lo0, hi1, lo1;
        detail::mulhilo(detail::philox_m0, ctr[0], hi0, lo0);
        detail::mulhilo(detail::philox_m1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += detail::philox_w0;
        key[1] += detail::philox_w1;
    }
    return ctr;
}

//---------------------------------------------------------------------------//
inline std::uint64_t RngStream::next_u64()
{
    if (buffered_ == 0)
    {
        PhiloxBlock ctr{static_cast<std::uint32_t>(counter_),
                        static_cast<std::uint32_t>(counter_ >> 32),
                        static_cast<std::uint32_t>(stream_),
                        static_cast<std::uint32_t>(stream_ >> 32)};
        PhiloxKey key{static_cast<std::uint32_t>(seed_),
                      static_cast<std::uint32_t>(seed_ >> 32)};
        PhiloxBlock out = philox4x32(ctr, key);
        words_[0] = (std::uint64_t{out[1]} << 32) | out[0];
        words_[1] = (std::uint64_t{out[3]} << 32) | out[2];
        ++counter_;
        buffered_ = 2;
    }
    return words_[2 - buffered_--];
}

inline double RngStream::uniform()
{
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

//---------------------------------------------------------------------------//
// Box-Muller; the second variate of each pair is kept for the next call
inline double RngStream::normal()
{
    if (has_normal_)
    {
        has_normal_ = false;
        return spare_normal_;
    }
    double const u1 = uniform();
    double const u2 = uniform();
    double const radius = std::sqrt(-2 * std::log(u1));
    double const angle = 2 * std::numbers::pi * u2;
    spare_normal_ = radius * std::sin(angle);
    has_normal_ = true;
    return radius * std::cos(angle);
}

inline void RngStream::normals(std::span<double> out)
{
    for (double& v : out)
    {
        v = normal();
    }
}

//---------------------------------------------------------------------------//
}  // namespace pbm
