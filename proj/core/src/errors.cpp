#include "dlimit/errors.hpp"

#include <utility>

namespace dlimit {

ParseError::ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& found)
    : InputError([&] {
          std::string msg = "parse error at offset " + std::to_string(offset) + ": expected ";
          for (std::size_t k = 0; k < expected.size(); ++k) {
              if (k) msg += k + 1 == expected.size() ? " or " : ", ";
              msg += expected[k];
          }
          msg += ", found " + found;
          return msg;
      }()),
      offset_(offset),
      expected_(std::move(expected)) {}

}  // namespace dlimit
