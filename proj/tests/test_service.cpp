#include <doctest.h>
#include <httplib.h>

#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>
#include <thread>

#include "cssd/service.hpp"

using namespace cssd;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    std::random_device rd;
    fs::path p = fs::temp_directory_path() / ("cssd-svc-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(p);
    return p;
}

json load(const char* name) {
    std::ifstream f(std::string(CSSD_SCENARIO_DIR) + "/" + name);
    return json::parse(f);
}

struct Fixture {
    fs::path dir = temp_dir();
    ScenarioStore store{dir / "store.json"};
    Service service{store};

    ~Fixture() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }

    std::pair<int, json> call(const std::string& method, const std::string& path, const json& body = json::object()) {
        const auto r = service.handle(method, path, body.dump());
        return {r.status, r.body.empty() ? json() : json::parse(r.body)};
    }
};

json config_a_sources() {
    json s = load("config_a.scenario.json");
    json sources = json::array(), weights = json::array();
    for (const auto& src : s["sources"]) {
        sources.push_back({{"id", src["id"]}, {"theta", src["theta"]}, {"tau_sq", src["tau_sq"]}});
        weights.push_back(src["w"]);
    }
    return {{"sources", sources}, {"weights", weights}, {"hyper", s["hyper"]}};
}

}  // namespace

TEST_CASE("sample-size with the Config A scenario") {
    Fixture fx;
    auto [status, body] = fx.call("POST", "/v1/sample-size", load("config_a.scenario.json"));
    CHECK(status == 200);
    CHECK(body["n"] == 204);
    CHECK(body["convention"] == "total");
    CHECK(std::fabs(body["prior"]["mean"].get<double>() - 0.131) < 1e-3);

    json freq = load("alzheimers.scenario.json");
    freq["mode"] = "frequentist";
    CHECK(fx.call("POST", "/v1/sample-size", freq).second["n"] == 338);
}

TEST_CASE("sample-size for every endpoint model") {
    Fixture fx;
    const json endpoints[] = {{{"model", "binary_two_arm"}, {"rho_t", 0.6}, {"rho_c", 0.4}},
                              {{"model", "time_to_event"}},
                              {{"model", "single_arm_binary"}, {"p", 0.3}}};
    for (const auto& e : endpoints) {
        json s = load("config_a.scenario.json");
        s["endpoint"] = e;
        s["design"]["delta"] = 0.5;
        auto [status, body] = fx.call("POST", "/v1/sample-size", s);
        CAPTURE(e.dump());
        CHECK(status == 200);
        CHECK(body["n"].get<long>() > 0);
        CHECK(body["endpoint"] == e["model"]);
    }
}

TEST_CASE("raw weights are a warning, not an error") {
    Fixture fx;
    json s = load("alzheimers.scenario.json");
    s["linearize"] = false;
    auto [status, body] = fx.call("POST", "/v1/sample-size", s);
    CHECK(status == 200);
    CHECK(body["n"] == 332);
    REQUIRE(body["warnings"].size() >= 1);
    CHECK(body["prior"]["warnings"].size() == 1);
}

TEST_CASE("linearize endpoint") {
    Fixture fx;
    json req = config_a_sources();
    auto [status, body] = fx.call("POST", "/v1/linearize", req);
    CHECK(status == 200);
    REQUIRE(body["transformed_weights"].size() == 5);
    CHECK(std::fabs(body["transformed_weights"][0].get<double>() / 3.05e-3 - 1) < 0.01);

    req["weights"] = json::array({0, 0, 0, 0, 0});
    CHECK(fx.call("POST", "/v1/linearize", req).second["transformed_weights"] == json::array({0, 0, 0, 0, 0}));

    req["weights"] = json::array({0, 0, 2, 0, 0});
    auto [bad, err] = fx.call("POST", "/v1/linearize", req);
    CHECK(bad == 400);
    CHECK(err["errors"][0]["path"] == "weights[2]");
}

TEST_CASE("prior endpoint") {
    Fixture fx;
    auto [status, body] = fx.call("POST", "/v1/prior", config_a_sources());
    CHECK(status == 200);
    CHECK(std::fabs(body["mean"].get<double>() - 0.131) < 1e-3);
    CHECK(std::fabs(body["variance"].get<double>() - 0.405) < 1e-3);
    CHECK(body["method"] == "star");
    CHECK(body["synthesis_weights"].size() == 5);

    json legacy = config_a_sources();
    legacy["method"] = "legacy";
    CHECK(fx.call("POST", "/v1/prior", legacy).second["method"] == "legacy");
    legacy["method"] = "median";
    CHECK(fx.call("POST", "/v1/prior", legacy).first == 400);
}

TEST_CASE("sweep endpoint and row cap") {
    Fixture fx;
    json req{{"scenario", load("fig1.scenario.json")}, {"axes", {1, 2}}, {"step", 0.05}};
    auto [status, body] = fx.call("POST", "/v1/sweep", req);
    CHECK(status == 200);
    CHECK(body["rows"].size() == 21 * 21);

    req["step"] = 0.001;  // 1001^2 rows
    CHECK(fx.call("POST", "/v1/sweep", req).first == 413);
    req["step"] = 0.05;
    req["axes"] = {3};
    CHECK(fx.call("POST", "/v1/sweep", req).first == 422);
}

TEST_CASE("simulate endpoint") {
    Fixture fx;
    json req{{"scenario", load("config_d.scenario.json")}, {"true_mu_delta", 0}, {"replicates", 2000}, {"seed", 5}};
    auto [status, body] = fx.call("POST", "/v1/simulate", req);
    CHECK(status == 200);
    CHECK(body["n"] == 112);
    CHECK(body["inconclusive"] == 0);
    CHECK(body["replicates"] == 2000);

    json no_seed = req;
    no_seed.erase("seed");
    CHECK(fx.call("POST", "/v1/simulate", no_seed).first == 400);
    json too_many = req;
    too_many["replicates"] = 1000001;
    CHECK(fx.call("POST", "/v1/simulate", too_many).first == 413);
}

TEST_CASE("compute endpoints are referentially transparent") {
    Fixture fx;
    const json sim{{"scenario", load("config_b.scenario.json")}, {"true_mu_delta", 1}, {"replicates", 1000}, {"seed", 9}};
    const std::string a = fx.service.handle("POST", "/v1/simulate", sim.dump()).body;
    const std::string b = fx.service.handle("POST", "/v1/simulate", sim.dump()).body;
    CHECK(a == b);
    const std::string s = load("config_b.scenario.json").dump();
    CHECK(fx.service.handle("POST", "/v1/sample-size", s).body == fx.service.handle("POST", "/v1/sample-size", s).body);
}

TEST_CASE("validation errors carry field paths") {
    Fixture fx;
    json s = load("config_a.scenario.json");
    s["sources"][1]["tau_sq"] = -1;
    auto [status, body] = fx.call("POST", "/v1/sample-size", s);
    CHECK(status == 400);
    CHECK(body["errors"][0]["path"] == "sources[1].tau_sq");

    const auto bad = fx.service.handle("POST", "/v1/sample-size", "{not json");
    CHECK(bad.status == 400);
    CHECK(fx.service.handle("GET", "/v1/nothing", "").status == 405);
    CHECK(fx.service.handle("POST", "/v2/sample-size", "{}").status == 404);
}

TEST_CASE("scenario CRUD") {
    Fixture fx;
    auto [created, rec] = fx.call("POST", "/v1/scenarios", load("config_a.scenario.json"));
    CHECK(created == 201);
    const std::string id = rec["id"];
    CHECK(!id.empty());
    CHECK(rec["created_at"] == rec["updated_at"]);

    const auto get1 = fx.service.handle("GET", "/v1/scenarios/" + id, "");
    CHECK(get1.status == 200);
    const auto put = fx.service.handle("PUT", "/v1/scenarios/" + id, get1.body);
    CHECK(put.status == 200);
    const auto get2 = fx.service.handle("GET", "/v1/scenarios/" + id, "");
    CHECK(get2.body == get1.body);

    json changed = json::parse(get1.body);
    changed["name"] = "renamed";
    CHECK(fx.call("PUT", "/v1/scenarios/" + id, changed).first == 200);
    CHECK(fx.call("GET", "/v1/scenarios/" + id).second["name"] == "renamed");

    json invalid = changed;
    invalid["sources"][0]["w"] = 7;
    CHECK(fx.call("PUT", "/v1/scenarios/" + id, invalid).first == 400);
    CHECK(fx.call("POST", "/v1/scenarios", invalid).first == 400);

    CHECK(fx.call("GET", "/v1/scenarios").second.size() == 1);
    CHECK(fx.service.handle("DELETE", "/v1/scenarios/" + id, "").status == 204);
    CHECK(fx.service.handle("GET", "/v1/scenarios/" + id, "").status == 404);
    CHECK(fx.service.handle("DELETE", "/v1/scenarios/" + id, "").status == 404);
    CHECK(fx.service.handle("PUT", "/v1/scenarios/nope", get1.body).status == 404);
}

TEST_CASE("store survives a restart") {
    const fs::path dir = temp_dir();
    std::vector<std::string> ids;
    std::string body_b;
    {
        ScenarioStore store(dir / "store.json");
        ids.push_back(store.create(load("config_a.scenario.json")).id);
        ids.push_back(store.create(load("config_b.scenario.json")).id);
        ids.push_back(store.create(load("config_c.scenario.json")).id);
        store.remove(ids[0]);
        body_b = store.get(ids[1])->scenario.dump();
    }
    CHECK(!fs::exists(dir / "store.json.tmp"));
    {
        ScenarioStore store(dir / "store.json");
        CHECK(store.list().size() == 2);
        CHECK(!store.get(ids[0]));
        REQUIRE(store.get(ids[1]));
        CHECK(store.get(ids[1])->scenario.dump() == body_b);
        const auto fresh = store.create(load("config_d.scenario.json"));
        CHECK(fresh.id != ids[0]);
        CHECK(fresh.id != ids[2]);
    }
    fs::remove_all(dir);
}

TEST_CASE("concurrent writers keep the store consistent") {
    Fixture fx;
    const json s = load("config_a.scenario.json");
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t) {
        threads.emplace_back([&] {
            for (int i = 0; i < 5; ++i) fx.store.create(s);
        });
    }
    for (auto& t : threads) t.join();
    CHECK(fx.store.list().size() == 40);
    ScenarioStore reopened(fx.dir / "store.json");
    CHECK(reopened.list().size() == 40);
}

TEST_CASE("served over http on a free port") {
    Fixture fx;
    httplib::Server server;
    fx.service.mount(server);
    const int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread worker([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    httplib::Client client("127.0.0.1", port);
    auto r = client.Post("/v1/sample-size", load("config_d.scenario.json").dump(), "application/json");
    REQUIRE(r);
    CHECK(r->status == 200);
    CHECK(json::parse(r->body)["n"] == 112);

    auto created = client.Post("/v1/scenarios", load("config_a.scenario.json").dump(), "application/json");
    REQUIRE(created);
    CHECK(created->status == 201);
    const std::string id = json::parse(created->body)["id"];
    auto got = client.Get("/v1/scenarios/" + id);
    REQUIRE(got);
    CHECK(got->status == 200);
    auto del = client.Delete("/v1/scenarios/" + id);
    REQUIRE(del);
    CHECK(del->status == 204);
    auto missing = client.Get("/v1/scenarios/" + id);
    REQUIRE(missing);
    CHECK(missing->status == 404);

    server.stop();
    worker.join();
}

TEST_CASE("cssd-serve takes its address from the environment") {
    const fs::path dir = temp_dir();
    const fs::path out = dir / "out.txt", pid = dir / "pid.txt";
    const std::string cmd = "CSSD_HOST=127.0.0.1 CSSD_PORT=0 CSSD_STORE='" + (dir / "s.json").string() + "' '" +
                            CSSD_SERVE_PATH + "' > '" + out.string() + "' 2>&1 & echo $! > '" + pid.string() + "'";
    REQUIRE(std::system(cmd.c_str()) == 0);

    int port = 0;
    const std::regex re("listening on http://127\\.0\\.0\\.1:(\\d+)");
    for (int i = 0; i < 100 && port == 0; ++i) {
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
        std::ifstream f(out);
        std::stringstream ss;
        ss << f.rdbuf();
        std::smatch m;
        const std::string text = ss.str();
        if (std::regex_search(text, m, re)) port = std::stoi(m[1]);
    }
    long child = 0;
    std::ifstream(pid) >> child;
    REQUIRE(port > 0);

    httplib::Client client("127.0.0.1", port);
    auto r = client.Post("/v1/linearize", config_a_sources().dump(), "application/json");
    REQUIRE(r);
    CHECK(r->status == 200);

    if (child > 0) ::kill(static_cast<pid_t>(child), SIGTERM);
    fs::remove_all(dir);
}
