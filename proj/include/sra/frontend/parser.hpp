#pragma once

#include "sra/frontend/ast.hpp"
#include "sra/frontend/diagnostics.hpp"

#include <string>
#include <string_view>

namespace sra {

// Syntax-only parsers. Syntax errors are reported as E001; parsing resumes at
// the next declaration so that later errors are reported too.
RawModel parse_model_syntax(std::string_view src, const std::string& file, Diagnostics& diags);
RawInvariantFile parse_invariant_syntax(std::string_view src, const std::string& file, Diagnostics& diags);
RawConfiguration parse_configuration_syntax(std::string_view src, const std::string& file, Diagnostics& diags);

} // namespace sra
