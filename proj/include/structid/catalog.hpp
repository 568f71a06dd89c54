#pragma once

#include "structid/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace structid::models {

/// The ten built-in model variants. BMR4/BMR3 are the base models; suffix
/// letters name the re-added model parts (A decay feedback, B gas solubility,
/// C nitrogen-limitation inhibition). ADM1_R4 == BMR4+AB; ADM1_R3 adds pH,
/// ammonia inhibition and ion dissociation on top of BMR3+ABC.
enum class Variant {
    BMR4,
    BMR4_A,
    BMR4_B,
    ADM1_R4,
    BMR3,
    BMR3_A,
    BMR3_AC,
    BMR3_BC,
    BMR3_ABC,
    ADM1_R3,
};

const std::vector<Variant>& all_variants();

std::string variant_name(Variant v);                    // canonical name, e.g. "ADM1-R4"
std::string variant_id(Variant v);                      // identifier form, e.g. "adm1_r4"
std::optional<Variant> parse_variant(const std::string& s); // accepts both forms

/// Exact transcription of the published equations; results are cached and
/// shared (ModelDef is immutable after construction).
ModelPtr build_model(Variant v);

} // namespace structid::models
