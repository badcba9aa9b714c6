#include "cssd/service.hpp"

#include <httplib.h>

#include <stdexcept>

#include "cssd/linearize.hpp"
#include "cssd/pipeline.hpp"
#include "cssd/scenario.hpp"

namespace cssd {

using nlohmann::json;

namespace {

struct HttpError {
    int status;
    json body;
};

HttpResponse reply(int status, const json& body) { return {status, body.dump()}; }

[[noreturn]] void fail(int status, const std::string& message) { throw HttpError{status, {{"error", message}}}; }

json parse_body(std::string_view body) {
    try {
        json doc = json::parse(body.begin(), body.end());
        if (!doc.is_object()) fail(400, "request body must be a JSON object");
        return doc;
    } catch (const json::parse_error& e) {
        fail(400, std::string("malformed JSON: ") + e.what());
    }
}

json field_errors(const ScenarioError& e) {
    json errors = json::array();
    for (const auto& f : e.errors()) {
        json item{{"path", f.path}, {"message", f.message}};
        if (f.line > 0) {
            item["line"] = f.line;
            item["column"] = f.column;
        }
        errors.push_back(item);
    }
    return {{"error", "validation failed"}, {"errors", errors}};
}

/// Scenario with request-only keys removed and schema defaults filled in.
ScenarioFile scenario_from_body(json doc, std::initializer_list<const char*> extra_keys) {
    for (const char* key : extra_keys) doc.erase(key);
    if (!doc.contains("schema_version")) doc["schema_version"] = kScenarioSchemaVersion;
    if (!doc.contains("sources")) doc["sources"] = json::array();
    return scenario_from_json(doc);
}

/// {sources, hyper, weights[, weights_scale]} -> scenario. Weight errors are
/// reported under weights[k].
ScenarioFile borrowing_request(const json& body) {
    if (!body.contains("sources") || !body.at("sources").is_array()) fail(400, "sources: expected an array");
    if (!body.contains("weights") || !body.at("weights").is_array()) fail(400, "weights: expected an array");
    const json& sources = body.at("sources");
    const json& weights = body.at("weights");
    if (sources.size() != weights.size()) fail(400, "weights: length must match sources");

    json doc{{"schema_version", kScenarioSchemaVersion},
             {"sources", json::array()},
             {"design", {{"delta", 1.0}, {"sigma0_sq", 1.0}}}};
    for (std::size_t k = 0; k < sources.size(); ++k) {
        json s = sources[k];
        if (s.is_object()) s["w"] = weights[k];
        doc["sources"].push_back(s);
    }
    if (body.contains("hyper")) doc["hyper"] = body.at("hyper");
    if (body.contains("weights_scale")) doc["weights_scale"] = body.at("weights_scale");
    try {
        return scenario_from_json(doc);
    } catch (const ScenarioError& e) {
        std::vector<FieldError> remapped = e.errors();
        for (auto& f : remapped) {
            const auto dot = f.path.rfind(".w");
            if (f.path.rfind("sources[", 0) == 0 && dot != std::string::npos && dot + 2 == f.path.size()) {
                f.path = "weights" + f.path.substr(7, dot - 7);
            }
        }
        throw ScenarioError(remapped);
    }
}

AggregationMethod method_option(const json& body) {
    const std::string m = body.value("method", "star");
    if (m == "star") return AggregationMethod::Star;
    if (m == "legacy") return AggregationMethod::Legacy;
    fail(400, "method: expected \"star\" or \"legacy\"");
}

json prior_response(const ScenarioFile& scenario, const WeightVector& used, const CollectivePrior& prior) {
    json j = to_json(prior);
    j["weights_used"] = to_json(used);
    if (used.scale() == WeightScale::Raw && prior.method == AggregationMethod::Star) {
        j["warnings"] = json::array({"prior built from raw weights: over-discounts historical data"});
    } else {
        j["warnings"] = json::array();
    }
    (void)scenario;
    return j;
}

HttpResponse post_linearize(const json& body) {
    json req = body;
    req["weights_scale"] = "raw";
    const ScenarioFile s = borrowing_request(req);
    const WeightVector out = linearize_all(s.sources, s.weight_vector(), s.hyper);
    return reply(200, {{"transformed_weights", std::vector<double>(out.values().begin(), out.values().end())}});
}

HttpResponse post_prior(const json& body) {
    const ScenarioFile s = borrowing_request(body);
    const WeightVector used = design_weights(s, body.value("linearize", true));
    const CollectivePrior prior = build_prior(s, used, method_option(body));
    return reply(200, prior_response(s, used, prior));
}

HttpResponse post_sample_size(const json& body) {
    const ScenarioFile s = scenario_from_body(body, {"mode", "method", "linearize", "results"});
    PipelineOptions options;
    const std::string mode = body.value("mode", "borrow");
    if (mode == "borrow") {
        options.mode = DesignMode::Borrow;
    } else if (mode == "no_borrow") {
        options.mode = DesignMode::NoBorrow;
    } else if (mode == "frequentist") {
        options.mode = DesignMode::Frequentist;
    } else {
        fail(400, "mode: expected borrow, no_borrow or frequentist");
    }
    options.method = method_option(body);
    options.linearize = body.value("linearize", true);

    const DesignOutcome d = run_design(s, options);
    json j = to_json(d.size);
    j["endpoint"] = std::string(endpoint_name(s.endpoint));
    j["mode"] = mode;
    if (d.prior) j["prior"] = prior_response(s, *d.weights, *d.prior);
    return reply(200, j);
}

ScenarioFile nested_scenario(const json& body) {
    if (!body.contains("scenario") || !body.at("scenario").is_object()) fail(400, "scenario: expected an object");
    return scenario_from_body(body.at("scenario"), {"results"});
}

HttpResponse post_sweep(const json& body) {
    const ScenarioFile s = nested_scenario(body);
    SweepSpec spec;
    spec.step = body.value("step", 0.01);
    if (!body.contains("axes") || !body.at("axes").is_array()) fail(400, "axes: expected an array of source numbers");
    for (const auto& a : body.at("axes")) {
        if (!a.is_number_integer() || a.get<long>() < 1) fail(400, "axes: source numbers start at 1");
        spec.axes.push_back(static_cast<std::size_t>(a.get<long>() - 1));
    }
    const std::size_t per_axis = sweep_grid(spec.step).size();
    std::size_t rows = 1;
    for (std::size_t i = 0; i < spec.axes.size(); ++i) rows *= per_axis;
    if (rows > kMaxSweepRows) fail(413, "sweep would produce " + std::to_string(rows) + " rows (cap 100000)");

    const auto table = sweep_surface(s.sources, s.hyper, s.design, s.weights, spec);
    return reply(200, sweep_to_json(table, spec.axes));
}

HttpResponse post_simulate(const json& body) {
    const ScenarioFile s = nested_scenario(body);
    if (!body.contains("seed")) fail(400, "seed: required so results are reproducible");
    const json& seed = body.at("seed");
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0)) {
        fail(400, "seed: expected a non-negative integer");
    }
    const long replicates = body.value("replicates", 10000L);
    if (replicates < 1) fail(400, "replicates: must be >= 1");
    if (replicates > kMaxReplicates) fail(413, "replicates capped at 1000000");
    if (!body.contains("true_mu_delta") || !body.at("true_mu_delta").is_number()) {
        fail(400, "true_mu_delta: expected a number");
    }
    if (!std::holds_alternative<endpoint::Normal>(s.endpoint)) {
        fail(422, "simulation is implemented for the normal endpoint only");
    }

    const DesignOutcome d = run_design(s, {});
    long n = d.size.n;
    if (body.contains("n")) {
        if (!body.at("n").is_number_integer()) fail(400, "n: expected an integer");
        n = body.at("n").get<long>();
    }
    SimulationConfig c = simulation_config(s, *d.prior, n, body.at("true_mu_delta").get<double>());
    c.replicates = replicates;
    c.seed = seed.get<std::uint64_t>();
    if (body.contains("futility_delta")) c.futility_delta = body.at("futility_delta").get<double>();

    json j = to_json(run_simulation(c));
    j["n"] = n;
    j["true_mu_delta"] = c.true_mu_delta;
    return reply(200, j);
}

json record_summary(const ScenarioStore::Record& r) {
    return {{"id", r.id}, {"created_at", r.created_at}, {"updated_at", r.updated_at}, {"scenario", r.scenario}};
}

}  // namespace

HttpResponse Service::scenarios(std::string_view method, std::string_view rest, std::string_view body) const {
    if (rest.empty()) {
        if (method == "GET") {
            json list = json::array();
            for (const auto& r : store_.list()) list.push_back(record_summary(r));
            return reply(200, list);
        }
        if (method == "POST") return reply(201, record_summary(store_.create(parse_body(body))));
        fail(405, "method not allowed");
    }
    const std::string id(rest);
    if (method == "GET") {
        const auto r = store_.get(id);
        if (!r) fail(404, "unknown scenario " + id);
        return reply(200, r->scenario);
    }
    if (method == "PUT") {
        const auto r = store_.update(id, parse_body(body));
        if (!r) fail(404, "unknown scenario " + id);
        return reply(200, record_summary(*r));
    }
    if (method == "DELETE") {
        if (!store_.remove(id)) fail(404, "unknown scenario " + id);
        return {204, ""};
    }
    fail(405, "method not allowed");
}

HttpResponse Service::handle(std::string_view method, std::string_view path, std::string_view body) const {
    try {
        constexpr std::string_view kScenarios = "/v1/scenarios";
        if (path == kScenarios) return scenarios(method, "", body);
        if (path.rfind(std::string(kScenarios) + "/", 0) == 0) {
            return scenarios(method, path.substr(kScenarios.size() + 1), body);
        }
        if (method != "POST") fail(path.rfind("/v1/", 0) == 0 ? 405 : 404, "not found");
        if (path == "/v1/linearize") return post_linearize(parse_body(body));
        if (path == "/v1/prior") return post_prior(parse_body(body));
        if (path == "/v1/sample-size") return post_sample_size(parse_body(body));
        if (path == "/v1/sweep") return post_sweep(parse_body(body));
        if (path == "/v1/simulate") return post_simulate(parse_body(body));
        fail(404, "not found");
    } catch (const HttpError& e) {
        return reply(e.status, e.body);
    } catch (const ScenarioError& e) {
        return reply(400, field_errors(e));
    } catch (const json::exception& e) {
        return reply(400, {{"error", e.what()}});
    } catch (const std::logic_error& e) {
        // invalid_argument, domain_error, out_of_range
        return reply(422, {{"error", e.what()}});
    } catch (const std::range_error& e) {
        return reply(422, {{"error", e.what()}});
    } catch (const std::exception& e) {
        return reply(500, {{"error", e.what()}});
    }
}

void Service::mount(httplib::Server& server) const {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
        const HttpResponse r = handle(req.method, req.path, req.body);
        res.status = r.status;
        if (!r.body.empty()) res.set_content(r.body, "application/json");
    };
    const std::string pattern = R"(/v1/.*)";
    server.Get(pattern, handler);
    server.Post(pattern, handler);
    server.Put(pattern, handler);
    server.Delete(pattern, handler);
}

}  // namespace cssd
