#pragma once

#include "heston/model.hpp"

#include <filesystem>
#include <string_view>

namespace heston {

/// Parses a model description with keys
/// {kappa, eta, sigma, rho, rd, rf, T, K, kind, barrier, S, V, c, d}.
/// `kind` is "call" or "down-and-out"; S, V, c, d default per default_domain().
/// The result is validated.
BenchmarkCase parse_model_config(std::string_view json_text);
BenchmarkCase load_model_config(const std::filesystem::path& path);

}  // namespace heston
