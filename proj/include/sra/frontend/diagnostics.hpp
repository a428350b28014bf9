#pragma once

#include "sra/core/source.hpp"

#include <string>
#include <vector>

namespace sra {

enum class Severity : std::uint8_t { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;
    std::string message;
    SourceSpan span;
};

std::string format(const Diagnostic& d);

class Diagnostics {
public:
    void error(std::string code, std::string message, SourceSpan span);
    void warning(std::string code, std::string message, SourceSpan span);
    void append(const std::vector<Diagnostic>& ds);

    bool has_errors() const;
    bool has_code(const std::string& code) const;
    const std::vector<Diagnostic>& all() const { return items_; }
    std::string str() const;

private:
    std::vector<Diagnostic> items_;
};

} // namespace sra
