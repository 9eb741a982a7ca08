#include "upcfekete/error.hpp"

namespace upcfekete {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Input: return "input";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::Capacity: return "capacity";
    case ErrorKind::DegenerateSet: return "degenerate_set";
    case ErrorKind::DegenerateMesh: return "degenerate_mesh";
    case ErrorKind::DegenerateConfiguration: return "degenerate_configuration";
    case ErrorKind::DescriptorInvalid: return "descriptor_invalid";
    case ErrorKind::NoClosedForm: return "no_closed_form";
    case ErrorKind::Fit: return "fit";
    case ErrorKind::Internal: return "internal";
  }
  return "unknown";
}

}  // namespace upcfekete
