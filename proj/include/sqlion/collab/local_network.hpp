#pragma once

#include <deque>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "sqlion/collab/agent.hpp"
#include "sqlion/collab/analyzer.hpp"
#include "sqlion/collab/broker.hpp"

namespace sqlion {

// Deterministic single-threaded network: one broker plus any number of agents
// and analyzers joined by in-memory queues. Nothing moves until drain().
class LocalNetwork {
public:
    explicit LocalNetwork(Clock clock = [] { return std::int64_t{1'700'000'000}; })
        : clock_(clock), broker_(clock) {}

    /// Adds an agent; its query ids come from a generator seeded with `id_seed`.
    Agent& add_agent(AgentOptions options, std::uint64_t id_seed) {
        auto node = std::make_unique<Node>();
        node->agent = std::make_unique<Agent>(std::move(options), wire::UuidGenerator(id_seed), clock_);
        auto& agent = *node->agent;
        attach(std::move(node), wire::encode(agent.hello()));
        return agent;
    }

    const Analyzer& add_analyzer(Analyzer analyzer) {
        auto node = std::make_unique<Node>();
        node->analyzer = std::make_unique<Analyzer>(std::move(analyzer));
        auto& a = *node->analyzer;
        attach(std::move(node), wire::encode(a.hello()));
        return a;
    }

    /// Feeds one access-log line to an agent. Returns whether a query was
    /// emitted.
    bool submit_log_line(Agent& agent, std::string_view line) {
        Node& node = node_of(agent);
        auto q = agent.ingest_line(line);
        if (!q) return false;
        outbound_.emplace_back(node.session, wire::encode(*q));
        return true;
    }

    /// Sends a raw line from a node to the broker (used to exercise protocol
    /// errors).
    void send_raw(Agent& agent, std::string line) { outbound_.emplace_back(node_of(agent).session, std::move(line)); }

    /// Routes and handles records until every queue is empty.
    void drain() {
        bool progress = true;
        while (progress) {
            progress = false;
            while (!outbound_.empty()) {
                auto [session, line] = std::move(outbound_.front());
                outbound_.pop_front();
                trace_.push_back(line);
                if (!broker_.receive(session, line)) close(session);
                progress = true;
            }
            for (auto& node : nodes_) {
                while (!node->inbox.empty()) {
                    std::string line = std::move(node->inbox.front());
                    node->inbox.pop_front();
                    deliver(*node, line);
                    progress = true;
                }
            }
        }
    }

    /// Every line the broker received, in routing order.
    const std::vector<std::string>& trace() const { return trace_; }
    /// Every line the broker delivered, with the receiving node's name.
    const std::vector<std::pair<std::string, std::string>>& deliveries() const { return deliveries_; }

    const Broker& broker() const { return broker_; }

    /// Whether the broker closed this agent's connection.
    bool disconnected(const Agent& agent) const {
        for (const auto& n : nodes_)
            if (n->agent.get() == &agent) return n->closed;
        return false;
    }

private:
    struct Node {
        std::unique_ptr<Agent> agent;
        std::unique_ptr<Analyzer> analyzer;
        Broker::SessionId session = 0;
        std::deque<std::string> inbox;
        bool closed = false;

        std::string name() const { return agent ? agent->name() : analyzer->name(); }
    };

    void attach(std::unique_ptr<Node> node, std::string hello) {
        Node* raw = node.get();
        raw->session = broker_.connect([raw](const std::string& line) { raw->inbox.push_back(line); });
        nodes_.push_back(std::move(node));
        outbound_.emplace_back(raw->session, std::move(hello));
    }

    Node& node_of(const Agent& agent) {
        for (auto& n : nodes_)
            if (n->agent.get() == &agent) return *n;
        throw InvalidArgument("agent is not part of this network");
    }

    void close(Broker::SessionId session) {
        broker_.disconnect(session);
        for (auto& n : nodes_) {
            if (n->session != session) continue;
            n->closed = true;
            // Drop anything else this node had queued.
            std::erase_if(outbound_, [&](const auto& e) { return e.first == session; });
        }
    }

    void deliver(Node& node, const std::string& line) {
        deliveries_.emplace_back(node.name(), line);
        auto msg = wire::decode(line);
        if (!msg) return;
        if (node.agent) {
            node.agent->handle(*msg);
        } else if (const auto* q = std::get_if<wire::Query>(&*msg)) {
            if (!node.closed) outbound_.emplace_back(node.session, wire::encode(node.analyzer->classify(*q)));
        }
    }

    Clock clock_;
    Broker broker_;
    std::vector<std::unique_ptr<Node>> nodes_;
    std::deque<std::pair<Broker::SessionId, std::string>> outbound_;
    std::vector<std::string> trace_;
    std::vector<std::pair<std::string, std::string>> deliveries_;
};

} // namespace sqlion
