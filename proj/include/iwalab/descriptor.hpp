#ifndef IWALAB_DESCRIPTOR_HPP
#define IWALAB_DESCRIPTOR_HPP

#include <string>

#include "iwalab/forms.hpp"

namespace iwalab {

// Descriptor files are flat `key = value` text (a TOML subset):
//   kind = "curve" | "delta" | "table"
//   label = "X0(11)"
//   curve:  a_invariants = [a1, a2, a3, a4, a6], conductor = N
//   delta:  level = 1, weight = 12
//   table:  level = N, weight = k, and one `a2 = ...`, `a3 = ...` per prime
// Integers are decimal strings of arbitrary size; `#` starts a comment.
EigenformDescriptor parse_descriptor_text(const std::string& text, const std::string& id_hint);
EigenformDescriptor load_descriptor(const std::string& path);

}  // namespace iwalab

#endif
