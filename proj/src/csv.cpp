#include "mmwent/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace mmwent {

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    if (v == 0.0)
        return "0"; // folds -0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string SummaryRecord::get(std::string_view key) const
{
    for (const auto& [k, v] : fields)
        if (k == key)
            return v;
    return {};
}

std::size_t SweepResult::column(std::string_view name) const
{
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name)
            return i;
    throw std::out_of_range("no column named " + std::string(name));
}

double SweepResult::number(std::size_t row, std::string_view col) const
{
    const Cell& c = rows.at(row).cells.at(column(col));
    if (const auto* d = std::get_if<double>(&c))
        return *d;
    if (const auto* i = std::get_if<std::int64_t>(&c))
        return static_cast<double>(*i);
    throw std::invalid_argument("column " + std::string(col) + " is not numeric");
}

std::string SweepResult::text(std::size_t row, std::string_view col) const
{
    const Cell& c = rows.at(row).cells.at(column(col));
    if (const auto* s = std::get_if<std::string>(&c))
        return *s;
    if (const auto* d = std::get_if<double>(&c))
        return format_number(*d);
    return std::to_string(std::get<std::int64_t>(c));
}

std::size_t SweepResult::nonconverged() const
{
    std::size_t n = 0;
    for (const auto& r : rows)
        n += r.converged ? 0 : 1;
    return n;
}

std::vector<const SummaryRecord*> SweepResult::records(std::string_view kind) const
{
    std::vector<const SummaryRecord*> out;
    for (const auto& s : summary)
        if (s.kind == kind)
            out.push_back(&s);
    return out;
}

void SweepResult::write_csv(std::ostream& os) const
{
    for (std::size_t i = 0; i < columns.size(); ++i)
        os << (i ? "," : "") << columns[i];
    os << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.cells.size(); ++i) {
            if (i)
                os << ',';
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>)
                        os << format_number(v);
                    else
                        os << v;
                },
                r.cells[i]);
        }
        os << '\n';
    }
    for (const auto& s : summary) {
        os << "# " << s.kind;
        for (const auto& [k, v] : s.fields)
            os << ',' << k << '=' << v;
        os << '\n';
    }
}

std::string SweepResult::to_csv() const
{
    std::ostringstream os;
    write_csv(os);
    return os.str();
}

} // namespace mmwent
