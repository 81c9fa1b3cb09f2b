#pragma once

#include <string>
#include <vector>

namespace recov {

// Built-in problem documents covering every ambient kind, measurement family
// and task the document runner supports.  Each fixture is generated
// programmatically and serialized canonically, so its bytes are stable
// across runs and platforms.
std::vector<std::string> fixture_names();

// Canonical JSON text of the named fixture; StructuralError for unknown names.
std::string fixture_document(const std::string& name);

}  // namespace recov
