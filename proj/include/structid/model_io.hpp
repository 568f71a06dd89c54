#pragma once

#include "structid/model.hpp"

#include <iosfwd>
#include <string>

namespace structid::models {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Sectioned UTF-8 model definition:
///   name = My-Model            (optional, before any section)
///   [states]     one symbol name per line
///   [inputs]     ...
///   [parameters] ...
///   [inlets]     ...
///   [constants]  ...
///   [dynamics]   <state> = <expr>, one line per state
///   [outputs]    <name> = <expr>, channel=online|offline
/// '#' starts a comment. Loaded models carry no Petersen matrix.
ModelDef load_model(std::istream& in, const std::string& display_name);
ModelDef load_model(const std::string& path);

void save_model(const ModelDef& m, std::ostream& out);
void save_model(const ModelDef& m, const std::string& path);

} // namespace structid::models
