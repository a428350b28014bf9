#include "sra/frontend/diagnostics.hpp"

#include <algorithm>

namespace sra {

std::string format(const Diagnostic& d)
{
    std::string loc = d.span.file.empty() ? "<input>" : d.span.file;
    loc += ":" + std::to_string(d.span.line) + ":" + std::to_string(d.span.column);
    return loc + ": " + (d.severity == Severity::Error ? "error" : "warning") + " " + d.code + ": " + d.message;
}

void Diagnostics::error(std::string code, std::string message, SourceSpan span)
{
    items_.push_back({Severity::Error, std::move(code), std::move(message), std::move(span)});
}

void Diagnostics::warning(std::string code, std::string message, SourceSpan span)
{
    items_.push_back({Severity::Warning, std::move(code), std::move(message), std::move(span)});
}

// Drops diagnostics already reported with the same code at the same place.
void Diagnostics::append(const std::vector<Diagnostic>& ds)
{
    for (const auto& d : ds) {
        bool seen = std::any_of(items_.begin(), items_.end(), [&](const Diagnostic& e) {
            return e.code == d.code && e.span.file == d.span.file && e.span.begin == d.span.begin;
        });
        if (!seen)
            items_.push_back(d);
    }
}

bool Diagnostics::has_errors() const
{
    return std::any_of(items_.begin(), items_.end(), [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

bool Diagnostics::has_code(const std::string& code) const
{
    return std::any_of(items_.begin(), items_.end(), [&](const Diagnostic& d) { return d.code == code; });
}

std::string Diagnostics::str() const
{
    std::string out;
    for (const auto& d : items_)
        out += format(d) + "\n";
    return out;
}

} // namespace sra
