#pragma once

#include "skewgp/posterior.hpp"

#include <cstdint>
#include <string>

namespace skewgp {

inline constexpr int kModelFormatVersion = 1;

std::string library_version();

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& text);
std::string hex(std::uint64_t v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

// JSON text <-> library types. Schema violations throw InputError.
std::string kernel_to_json(const KernelSpec& kernel);
KernelSpec kernel_from_json(const std::string& text);
std::string prior_to_json(const SkewPriorSpec& prior);
SkewPriorSpec prior_from_json(const std::string& text);
std::string dataset_to_json(const Dataset& data);
Dataset dataset_from_json(const std::string& text);
std::string observations_to_json(const ObservationSet& obs);
ObservationSet observations_from_json(const std::string& text);

/// Versioned model file: root prior spec, observation history, fit options,
/// chain state and the posterior at the training inputs. Requires a model
/// fitted from a SkewPriorSpec.
std::string model_to_json(const FittedModel& model);
/// Refits from the stored prior and history; the result is bit-identical to
/// the saved model for the same library version. Throws InputError when the
/// stored chain state does not match the refit.
FittedModel model_from_json(const std::string& text);

}  // namespace skewgp
