// Copyright casimir-piston contributors
// SPDX-License-Identifier: Apache-2.0
//! \file casimir/parallel.hpp
#pragma once

#include <cstddef>
#include <functional>

namespace casimir
{
//! Worker count: CASIMIR_THREADS if set (must be a positive integer),
//! otherwise the hardware concurrency. Throws std::invalid_argument on a
//! malformed environment value.
unsigned worker_count();

//! Parse a CASIMIR_THREADS-style value; throws on anything but a positive
//! integer.
unsigned parse_thread_count(char const* text);

/*!
 * Run `body(stratum)` for every stratum in [0, n_strata).
 *
 * Strata are claimed dynamically by up to `workers` threads. Callers write
 * per-stratum partial results into preallocated slots and reduce them in
 * stratum order afterwards, so results never depend on the schedule. The
 * first exception thrown by any stratum is rethrown on the calling thread.
 */
void for_each_stratum(std::size_t n_strata,
                      std::function<void(std::size_t)> const& body,
                      unsigned workers = worker_count());

}  // namespace casimir
