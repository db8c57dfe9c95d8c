#include "dtsm/spec_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dtsm/errors.hpp"

namespace dtsm {

using nlohmann::json;

StepDist ModelSpec::step_dist() const {
    return has_alpha ? StepDist::sibuya(alpha) : StepDist::table(step_pmf);
}

namespace {

Matrix parse_matrix(const json& j, size_t n) {
    Matrix a(n, std::vector<double>(n, 0.0));
    if (!j.is_array()) throw usage_error("model spec: field 'a' must be an array");
    if (!j.empty() && j.front().is_array()) {
        if (j.size() != n) throw usage_error("model spec: 'a' row count does not match states");
        for (size_t i = 0; i < n; ++i) {
            if (j[i].size() != n) throw usage_error("model spec: 'a' must be square");
            for (size_t k = 0; k < n; ++k) a[i][k] = j[i][k].get<double>();
        }
    } else {
        if (j.size() != n * n)
            throw usage_error("model spec: flat 'a' must hold states^2 entries, row-major");
        for (size_t i = 0; i < n; ++i)
            for (size_t k = 0; k < n; ++k) a[i][k] = j[i * n + k].get<double>();
    }
    return a;
}

}  // namespace

ModelSpec parse_model_spec(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw usage_error(std::string("model spec: invalid JSON: ") + e.what());
    }
    try {
        ModelSpec spec;
        if (!j.contains("states")) throw usage_error("model spec: missing field 'states'");
        for (const auto& s : j.at("states"))
            spec.markov.states.push_back(s.get<std::string>());
        if (!j.contains("a")) throw usage_error("model spec: missing field 'a'");
        spec.markov.a = parse_matrix(j.at("a"), spec.markov.states.size());
        spec.markov.validate();

        const std::string kind = j.value("kind", "A");
        if (kind == "A" || kind == "a")
            spec.kind = DmlKind::type_a;
        else if (kind == "B" || kind == "b")
            spec.kind = DmlKind::type_b;
        else
            throw usage_error("model spec: 'kind' must be \"A\" or \"B\"");

        const bool has_alpha = j.contains("alpha");
        const bool has_pmf = j.contains("step_pmf");
        if (has_alpha == has_pmf)
            throw usage_error("model spec: provide exactly one of 'alpha' or 'step_pmf'");
        spec.has_alpha = has_alpha;
        if (has_alpha) {
            spec.alpha = j.at("alpha").get<double>();
            if (!(spec.alpha > 0.0) || spec.alpha > 1.0)
                throw usage_error("model spec: 'alpha' must lie in (0, 1]");
        } else {
            spec.step_pmf.mass.clear();
            for (const auto& v : j.at("step_pmf"))
                spec.step_pmf.mass.push_back(v.get<double>());
            spec.step_pmf.tail_bound = j.value("step_pmf_tail", 0.0);
            spec.step_pmf.validate();
        }
        spec.seed = j.value("seed", std::uint64_t{0});
        return spec;
    } catch (const json::exception& e) {
        throw usage_error(std::string("model spec: malformed field: ") + e.what());
    }
}

ModelSpec load_model_spec(const std::string& path) { return parse_model_spec(read_file(path)); }

std::string model_spec_to_json(const ModelSpec& spec) {
    json j;
    j["states"] = spec.markov.states;
    j["a"] = spec.markov.a;
    j["kind"] = spec.kind == DmlKind::type_a ? "A" : "B";
    if (spec.has_alpha) {
        j["alpha"] = spec.alpha;
    } else {
        j["step_pmf"] = spec.step_pmf.mass;
        if (spec.step_pmf.tail_bound != 0.0) j["step_pmf_tail"] = spec.step_pmf.tail_bound;
    }
    j["seed"] = spec.seed;
    return j.dump(2) + "\n";
}

void save_model_spec(const ModelSpec& spec, const std::string& path) {
    write_file_atomic(path, model_spec_to_json(spec));
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw usage_error("cannot open for writing: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out.flush()) throw usage_error("write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw usage_error("cannot replace " + path + ": " + ec.message());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw usage_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace dtsm
