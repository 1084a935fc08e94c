#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace wcat {

// Exact rational used for all cost, time and energy arithmetic. Floating
// point only ever appears in rendered reports.
using Rat = mpq_class;

inline Rat rat(long num, long den = 1) {
  Rat q(num, den);
  q.canonicalize();
  return q;
}

Rat rat_from_u64(std::uint64_t v);
Rat rat_from_i64(std::int64_t v);

// True iff q has no fractional part.
bool is_integer(const Rat& q);

// Nearest integer, ties to even.
Rat round_half_even(const Rat& q);

// floor/ceil as rationals.
Rat rat_floor(const Rat& q);
Rat rat_ceil(const Rat& q);

// Parses a plain decimal literal ("28", "3.3", "-0.25", "1e6" is rejected)
// into an exact rational. Throws std::invalid_argument on malformed input.
Rat parse_decimal(const std::string& text);

// Renders q as an exact decimal string. Throws std::domain_error if the
// denominator has prime factors other than 2 and 5 (non-terminating).
std::string to_exact_decimal(const Rat& q);

// True iff q has a terminating decimal expansion.
bool has_terminating_decimal(const Rat& q);

// Rounds q to `sig_figs` significant figures (ties to even) and renders it
// as a decimal with trailing fractional zeros stripped. Matches the report
// tables' formatting: format_sig(rat(3,10), 3) == "0.3".
std::string format_sig(const Rat& q, int sig_figs);

// Exact decimal if terminating, else rounded to 18 significant figures.
// Deterministic for identical input; used by the LP exporter.
std::string lp_number(const Rat& q);

}  // namespace wcat
