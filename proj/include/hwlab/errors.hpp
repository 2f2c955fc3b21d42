#pragma once

#include <stdexcept>
#include <string>

namespace hwlab {

enum class errc {
  invalid_argument,
  invalid_form,
  grid_mismatch,
  not_in_l2,
  not_an_eigenvalue,
  not_integrable,
  degenerate_chain,
  gluing_violation,
  invalid_supports,
  not_in_alglat,
  index_undefined,
  malformed_csv,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::invalid_argument: return "invalid-argument";
    case errc::invalid_form: return "invalid-form";
    case errc::grid_mismatch: return "grid-mismatch";
    case errc::not_in_l2: return "not-in-L2";
    case errc::not_an_eigenvalue: return "not-an-eigenvalue";
    case errc::not_integrable: return "not-integrable";
    case errc::degenerate_chain: return "degenerate-chain";
    case errc::gluing_violation: return "gluing-violation";
    case errc::invalid_supports: return "invalid-supports";
    case errc::not_in_alglat: return "not-in-alglat";
    case errc::index_undefined: return "index-undefined";
    case errc::malformed_csv: return "malformed-csv";
  }
  return "error";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) { throw error(code, msg); }

inline void require(bool cond, errc code, const std::string& msg) {
  if (!cond) fail(code, msg);
}

// Parse failures carry the offset into the source text so callers can point at it.
class parse_error : public error {
 public:
  parse_error(std::size_t position, const std::string& msg)
      : error(errc::invalid_argument,
              msg + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace hwlab
