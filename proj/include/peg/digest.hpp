#ifndef PEG_DIGEST_HPP
#define PEG_DIGEST_HPP

#include <string>
#include <string_view>

namespace peg {

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

} // namespace peg

#endif
