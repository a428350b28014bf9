#pragma once

#include <cstddef>
#include <string>

namespace sra {

struct SourceSpan {
    std::string file;
    std::size_t begin = 0;
    std::size_t end = 0;
    int line = 0;
    int column = 0;
};

} // namespace sra
