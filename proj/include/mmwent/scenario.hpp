#pragma once

// Named sweeps over the Gaussian, Fock and link layers. Each run yields one
// CSV table: a header with unit-suffixed column names, one row per grid point
// in a fixed order, then '#'-prefixed summary records (thresholds found by
// bisection between bracketing grid points).

#include "mmwent/config.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace mmwent {

using Cell = std::variant<double, std::int64_t, std::string>;

struct SweepRow {
    std::vector<Cell> cells;
    bool converged = true;
};

struct SummaryRecord {
    std::string kind;
    std::vector<std::pair<std::string, std::string>> fields;

    /// Value of field `key`, empty when absent.
    std::string get(std::string_view key) const;
};

struct SweepResult {
    Scenario scenario = Scenario::fig2;
    std::vector<std::string> columns;
    std::vector<SweepRow> rows;
    std::vector<SummaryRecord> summary;

    std::size_t column(std::string_view name) const;
    double number(std::size_t row, std::string_view col) const;
    std::string text(std::size_t row, std::string_view col) const;
    std::size_t nonconverged() const;
    std::vector<const SummaryRecord*> records(std::string_view kind) const;

    void write_csv(std::ostream& os) const;
    std::string to_csv() const;
};

/// "%.10g", with "0", "nan" and "inf" spelled out.
std::string format_number(double v);

/// Boundary of predicate `inside` between lo and hi, where inside(lo) != inside(hi).
double bisect_boundary(const std::function<bool(double)>& inside, double lo, double hi, double tol = 1e-13);

SweepResult run_fig1(const SweepSpec& spec);
SweepResult run_fig2(const SweepSpec& spec);
SweepResult run_fig3(const SweepSpec& spec);
SweepResult run_fig4(const SweepSpec& spec);
SweepResult run_link_budget(const SweepSpec& spec);
SweepResult run_eb_thresholds(const SweepSpec& spec);

/// Validates and dispatches on spec.scenario.
SweepResult run_scenario(const SweepSpec& spec);

/// Human-readable table for a link-budget result.
std::string link_budget_report(const SweepResult& result);

} // namespace mmwent
