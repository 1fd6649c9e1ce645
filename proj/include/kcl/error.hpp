#ifndef KCL_ERROR_HPP_
#define KCL_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace kcl {

/// Failure raised by a solver module. what() reads "module: message".
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& message);

  const std::string& module() const noexcept { return module_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string module_;
  std::string message_;
};

}  // namespace kcl

#endif  // KCL_ERROR_HPP_
