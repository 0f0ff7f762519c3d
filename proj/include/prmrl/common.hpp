#pragma once

#include <stdexcept>
#include <string>

namespace prmrl {

// Error taxonomy. Definition errors are programming/authoring mistakes,
// config errors come from user input, numeric errors from bad values at
// runtime, totality errors from machines whose guards fail to fire
// exactly once.
struct DefinitionError : std::logic_error {
    using std::logic_error::logic_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TotalityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace prmrl
