#pragma once

// Command-line front end: eig, sweep, lemma1, lemma2, ratio, verify, plotdata.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace spectralgap::cli {

/// Parses "1/64" or "0.015625".
double parse_number(const std::string& text);

/// Comma-separated list of parse_number values.
std::vector<double> parse_list(const std::string& text);

/// --seed beats the SPECTRALGAP_SEED value, which beats the built-in default.
std::uint64_t resolve_seed(const std::optional<std::string>& flag, const char* env_value);

/// Runs one command. Results go to `out` (or the --out file), structured
/// errors to `err`. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spectralgap::cli
