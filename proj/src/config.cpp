#include "heston/config.hpp"

#include "heston/error.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace heston {

namespace {

double required(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) throw ValidationError(std::string("missing config key '") + key + "'");
    if (!j.at(key).is_number()) throw ValidationError(std::string("config key '") + key + "' must be a number");
    return j.at(key).get<double>();
}

OptionKind parse_kind(const std::string& s) {
    if (s == "call" || s == "european" || s == "EuropeanCall") return OptionKind::EuropeanCall;
    if (s == "down-and-out" || s == "down-and-out-call" || s == "DownAndOutCall") return OptionKind::DownAndOutCall;
    throw ValidationError("unknown option kind '" + s + "'");
}

}  // namespace

BenchmarkCase parse_model_config(std::string_view json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("malformed config: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("config must be a JSON object");

    BenchmarkCase c;
    c.params = HestonParams{required(j, "kappa"), required(j, "eta"), required(j, "sigma"),
                            required(j, "rho"),   required(j, "rd"),  required(j, "rf")};
    c.option.strike = required(j, "K");
    c.option.maturity = required(j, "T");
    c.option.kind = j.contains("kind") ? parse_kind(j.at("kind").get<std::string>()) : OptionKind::EuropeanCall;
    if (j.contains("barrier") && !j.at("barrier").is_null()) c.option.barrier = required(j, "barrier");

    validate(c.params, c.option);

    c.domain = default_domain(c.option);
    if (j.contains("S")) c.domain.s_max = required(j, "S");
    if (j.contains("V")) c.domain.v_max = required(j, "V");
    if (j.contains("c")) c.domain.s_conc = required(j, "c");
    if (j.contains("d")) {
        c.domain.v_conc = required(j, "d");
    } else if (j.contains("V")) {
        c.domain.v_conc = c.domain.v_max / 500.0;
    }
    validate(c.domain, c.option);
    return c;
}

BenchmarkCase load_model_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_model_config(buf.str());
}

}  // namespace heston
