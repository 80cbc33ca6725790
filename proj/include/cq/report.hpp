#pragma once

#include <string>

#include "cq/suites.hpp"

namespace cq {

std::string report_json(const VerificationReport& r);
VerificationReport parse_report_json(const std::string& text);
// Header: name,residual,tolerance,pass
std::string report_csv(const VerificationReport& r);
// Writes json or csv; unknown formats raise UsageError, unwritable paths std::runtime_error.
void emit_report(const VerificationReport& r, const std::string& format, const std::string& path);

// INI-style config: a [verify] section with keys named after the CLI flags
// (hbar, dim, grid, samples, seed, report, format) and a [tol] section.
SuiteConfig load_config(const std::string& path, SuiteConfig base = {});

std::vector<double> parse_double_list(const std::string& text);

}  // namespace cq
