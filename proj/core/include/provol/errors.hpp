#pragma once

#include <stdexcept>
#include <string>

namespace provol {

// Input data spans no usable range (e.g. constant yield series has no bandwidth).
class degenerate_data_error : public std::runtime_error {
public:
    explicit degenerate_data_error(const std::string& what) : std::runtime_error(what) {}
};

// A least-squares design cannot identify the requested coefficients.
class singular_fit_error : public std::runtime_error {
public:
    explicit singular_fit_error(const std::string& what) : std::runtime_error(what) {}
};

// A tabular input file violates its declared grammar; message names the row.
class parse_error : public std::runtime_error {
public:
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace provol
