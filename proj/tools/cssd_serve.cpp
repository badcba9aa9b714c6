// cssd-serve: /v1 HTTP API over a file-backed scenario store.
#include <CLI11.hpp>
#include <httplib.h>

#include <cstdlib>
#include <iostream>
#include <string>

#include "cssd/service.hpp"

namespace {

std::string env_or(const char* name, std::string fallback) {
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : fallback;
}

}  // namespace

int main(int argc, char** argv) {
    std::string host = env_or("CSSD_HOST", "127.0.0.1");
    int port = std::stoi(env_or("CSSD_PORT", "8080"));
    std::string store_path = env_or("CSSD_STORE", "scenarios.store.json");

    CLI::App app{"cssd HTTP service"};
    app.add_option("--host", host)->capture_default_str();
    app.add_option("--port", port, "0 picks a free port")->capture_default_str();
    app.add_option("--store", store_path, "Scenario store file")->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    try {
        cssd::ScenarioStore store(store_path);
        cssd::Service service(store);
        httplib::Server server;
        service.mount(server);
        if (port == 0) {
            port = server.bind_to_any_port(host);
        } else if (!server.bind_to_port(host, port)) {
            std::cerr << "cannot bind " << host << ':' << port << '\n';
            return 2;
        }
        if (port < 0) {
            std::cerr << "cannot bind " << host << '\n';
            return 2;
        }
        std::cout << "listening on http://" << host << ':' << port << std::endl;
        return server.listen_after_bind() ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
