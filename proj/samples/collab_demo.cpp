// Three agents, one analyzer, one broker, all in one process. Trains a small
// tree model, reports one injection attempt at agent 1 and prints the
// traffic the broker saw and who ends up blocking the source.

#include <iostream>

#include "sqlion/collab/local_network.hpp"
#include "sqlion/dataset/builder.hpp"
#include "sqlion/dataset/corpus.hpp"
#include "sqlion/ml/decision_tree.hpp"

using namespace sqlion;

int main() {
    auto mal = generate_corpus({CorpusKind::malicious, 2000, 1, false});
    auto leg = generate_corpus({CorpusKind::legitimate, 500, 1, false});
    Model model = train_tree(build_dataset(mal, leg, default_dictionary()));

    LocalNetwork net;
    std::vector<Agent*> agents;
    for (int i = 1; i <= 3; ++i) {
        AgentOptions opts;
        opts.name = "edge-" + std::to_string(i);
        agents.push_back(&net.add_agent(opts, i));
    }
    net.add_analyzer(Analyzer("analyzer-1", model, default_dictionary()));

    const char* lines[] = {
        R"(192.0.2.10 - - [14/Nov/2023:22:13:19 +0000] "GET /search?blue+shoes HTTP/1.1" 200 812 "-" "Mozilla/5.0")",
        R"(10.0.0.9 - - [14/Nov/2023:22:13:20 +0000] "GET /?id=1' or '1'='1'-- HTTP/1.1" 200 512 "-" "sqlmap/1.7")",
    };
    for (const char* line : lines) net.submit_log_line(*agents[0], line);
    net.drain();

    for (const auto& line : net.trace()) std::cout << "broker <- " << line << "\n";
    for (auto* a : agents)
        std::cout << a->name() << ": 10.0.0.9 " << (a->is_blocked("10.0.0.9") ? "blocked" : "allowed")
                  << ", 192.0.2.10 " << (a->is_blocked("192.0.2.10") ? "blocked" : "allowed") << "\n";
}
