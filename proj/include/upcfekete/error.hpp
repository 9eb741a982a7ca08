#pragma once

#include <stdexcept>
#include <string>

namespace upcfekete {

enum class ErrorKind {
  Input,
  Shape,
  Capacity,
  DegenerateSet,
  DegenerateMesh,
  DegenerateConfiguration,
  DescriptorInvalid,
  NoClosedForm,
  Fit,
  Internal,
};

const char* error_kind_name(ErrorKind kind);

// Every error carries the module that raised it so reports can print
// codes like "geometry.degenerate_set".
class Error : public std::runtime_error {
 public:
  Error(std::string module, ErrorKind kind, const std::string& message)
      : std::runtime_error(message), module_(std::move(module)), kind_(kind) {}

  const std::string& module() const { return module_; }
  ErrorKind kind() const { return kind_; }
  std::string code() const { return module_ + "." + error_kind_name(kind_); }

 private:
  std::string module_;
  ErrorKind kind_;
};

}  // namespace upcfekete
