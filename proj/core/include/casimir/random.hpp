// Copyright casimir-piston contributors
// SPDX-License-Identifier: Apache-2.0
//! \file casimir/random.hpp
//! Counter-based random streams.
//!
//! Every random number in the engine is a pure function of
//! (seed, stream tag, substream, index, block). A stream can therefore be
//! recreated in isolation on any thread, which is what makes parallel
//! reductions independent of the worker count.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace casimir
{
//---------------------------------------------------------------------------//
//! Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
//! as easy as 1, 2, 3").
class Philox4x32
{
  public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter apply(Counter ctr, Key key)
    {
        for (int round = 0; round < 10; ++round)
        {
            if (round > 0)
            {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            ctr = single_round(ctr, key);
        }
        return ctr;
    }

  private:
    static constexpr std::uint32_t kMult0 = 0xD2511F53u;
    static constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static constexpr Counter single_round(Counter const& c, Key const& k)
    {
        std::uint64_t const p0 = std::uint64_t{kMult0} * c[0];
        std::uint64_t const p1 = std::uint64_t{kMult1} * c[2];
        auto const hi0 = static_cast<std::uint32_t>(p0 >> 32);
        auto const lo0 = static_cast<std::uint32_t>(p0);
        auto const hi1 = static_cast<std::uint32_t>(p1 >> 32);
        auto const lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

//! Disjoint purposes that draw random numbers from the same seed.
enum class StreamTag : std::uint8_t
{
    loop_shape = 1,  //!< unit-loop construction
    base_point = 2,  //!< base point draws (x) in energy integrands
    spectral = 3,    //!< base point draws in spectral estimates
    test = 0xFF,
};

//---------------------------------------------------------------------------//
/*!
 * Sequential view of one counter-based stream.
 *
 * The 128-bit counter is (block, tag|substream, index low, index high) and
 * the 64-bit seed is the key. Substreams are limited to 24 bits.
 */
class RandomStream
{
  public:
    RandomStream(std::uint64_t seed,
                 StreamTag tag,
                 std::uint64_t index,
                 std::uint32_t substream = 0)
        : key_{static_cast<std::uint32_t>(seed),
               static_cast<std::uint32_t>(seed >> 32)}
        , ctr_{0,
               (std::uint32_t{static_cast<std::uint8_t>(tag)} << 24)
                   | (substream & 0x00FFFFFFu),
               static_cast<std::uint32_t>(index),
               static_cast<std::uint32_t>(index >> 32)}
    {
    }

    //! Next 32 random bits.
    std::uint32_t next_bits()
    {
        if (used_ == 4)
        {
            refill();
        }
        return block_[used_++];
    }

    //! Uniform on the open interval (0, 1) with 32-bit resolution.
    double uniform()
    {
        return (static_cast<double>(next_bits()) + 0.5) * 0x1p-32;
    }

    //! Standard normal deviate (Marsaglia polar method, one cached spare).
    double normal()
    {
        if (has_spare_)
        {
            has_spare_ = false;
            return spare_;
        }
        double u;
        double v;
        double s;
        do
        {
            u = 2 * uniform() - 1;
            v = 2 * uniform() - 1;
            s = u * u + v * v;
        } while (s >= 1 || s == 0);
        double const factor = std::sqrt(-2 * std::log(s) / s);
        spare_ = v * factor;
        has_spare_ = true;
        return u * factor;
    }

    //! Number of Philox blocks consumed so far.
    std::uint32_t blocks_used() const { return ctr_[0]; }

  private:
    Philox4x32::Key key_;
    Philox4x32::Counter ctr_;
    Philox4x32::Counter block_{};
    int used_{4};
    double spare_{0};
    bool has_spare_{false};

    void refill()
    {
        block_ = Philox4x32::apply(ctr_, key_);
        ++ctr_[0];
        used_ = 0;
    }
};

}  // namespace casimir
