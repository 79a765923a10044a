#include "logitq/graph.hpp"

#include <algorithm>
#include <set>

#include "logitq/errors.hpp"

namespace logitq {

bool Digraph::has_edge(std::size_t from, std::size_t to) const {
  const auto& adj = out.at(from);
  return std::binary_search(adj.begin(), adj.end(), to);
}

StateGraph build_state_graph(const MarkovGame& game) {
  StateGraph g;
  g.out.resize(game.n_states());
  for (StateIndex s = 0; s < game.n_states(); ++s) {
    for (StateIndex t = 0; t < game.n_states(); ++t) {
      for (ProfileIndex a = 0; a < game.n_profiles(); ++a) {
        if (game.transition(s, a, t) > 0.0) {
          g.out[s].push_back(t);
          break;
        }
      }
    }
  }
  return g;
}

std::vector<std::vector<std::size_t>> strongly_connected_components(
    const Digraph& g) {
  const std::size_t n = g.size();
  constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnvisited), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> components;
  std::size_t counter = 0;

  struct Frame {
    std::size_t v;
    std::size_t next_edge;
  };
  std::vector<Frame> call;

  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    call.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;

    while (!call.empty()) {
      Frame& f = call.back();
      const auto& adj = g.out[f.v];
      if (f.next_edge < adj.size()) {
        const std::size_t w = adj[f.next_edge++];
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      const std::size_t v = f.v;
      call.pop_back();
      if (!call.empty()) {
        low[call.back().v] = std::min(low[call.back().v], low[v]);
      }
      if (low[v] == index[v]) {
        std::vector<std::size_t> comp;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        components.push_back(std::move(comp));
      }
    }
  }
  return components;
}

std::vector<std::vector<std::size_t>> recurrent_classes(const Digraph& g) {
  auto components = strongly_connected_components(g);
  std::vector<std::size_t> comp_of(g.size());
  for (std::size_t c = 0; c < components.size(); ++c) {
    for (auto v : components[c]) comp_of[v] = c;
  }
  std::vector<std::vector<std::size_t>> closed;
  for (std::size_t c = 0; c < components.size(); ++c) {
    bool is_closed = true;
    for (auto v : components[c]) {
      for (auto w : g.out[v]) {
        if (comp_of[w] != c) {
          is_closed = false;
          break;
        }
      }
      if (!is_closed) break;
    }
    if (is_closed) closed.push_back(std::move(components[c]));
  }
  std::sort(closed.begin(), closed.end());
  return closed;
}

StateSet transient_states(const Digraph& g,
                          const std::vector<std::vector<std::size_t>>& classes) {
  std::vector<bool> recurrent(g.size(), false);
  for (const auto& c : classes) {
    for (auto v : c) recurrent[v] = true;
  }
  StateSet out;
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (!recurrent[v]) out.push_back(v);
  }
  return out;
}

ProfileIndex RaisedGraph::profile_at(std::size_t vertex, StateIndex s) const {
  std::size_t strategy = vertex % strategies;
  for (std::size_t t = n_states; t-- > s + 1;) strategy /= n_profiles;
  return strategy % n_profiles;
}

RaisedGraph build_raised_graph(const MarkovGame& game, std::size_t cap) {
  RaisedGraph raised;
  raised.n_states = game.n_states();
  raised.n_profiles = game.n_profiles();

  // |S| * |A|^|S| with overflow-safe cap check.
  std::size_t strategies = 1;
  for (std::size_t t = 0; t < raised.n_states; ++t) {
    if (strategies > cap / raised.n_profiles) {
      throw SizeError("raised graph exceeds vertex cap " + std::to_string(cap));
    }
    strategies *= raised.n_profiles;
  }
  if (strategies > cap / raised.n_states) {
    throw SizeError("raised graph exceeds vertex cap " + std::to_string(cap));
  }
  raised.strategies = strategies;
  const std::size_t n_vertices = raised.n_states * strategies;
  raised.graph.out.resize(n_vertices);

  const auto& codec = game.codec();
  // Weight of state s's digit inside the strategy index.
  std::vector<std::size_t> digit_weight(raised.n_states);
  {
    std::size_t w = 1;
    for (std::size_t t = raised.n_states; t-- > 0;) {
      digit_weight[t] = w;
      w *= raised.n_profiles;
    }
  }

  std::vector<ProfileIndex> candidates;
  for (std::size_t v = 0; v < n_vertices; ++v) {
    const StateIndex s = raised.state_of(v);
    const std::size_t strategy = v % strategies;
    const ProfileIndex current = raised.profile_at(v, s);

    candidates.clear();
    candidates.push_back(current);
    for (std::size_t i = 0; i < codec.n_agents(); ++i) {
      for (std::size_t act = 0; act < codec.action_count(i); ++act) {
        candidates.push_back(codec.with_component(current, i, act));
      }
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()),
                     candidates.end());

    auto& adj = raised.graph.out[v];
    for (ProfileIndex played : candidates) {
      const std::size_t next_strategy =
          strategy - current * digit_weight[s] + played * digit_weight[s];
      for (StateIndex t = 0; t < raised.n_states; ++t) {
        if (game.transition(s, played, t) > 0.0) {
          adj.push_back(raised.vertex(t, next_strategy));
        }
      }
    }
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }
  return raised;
}

ProjectionReport projection_report(const MarkovGame& game, std::size_t cap) {
  const auto raised = build_raised_graph(game, cap);
  const auto state_classes = recurrent_classes(build_state_graph(game));
  const auto raised_classes = recurrent_classes(raised.graph);

  ProjectionReport report;
  report.raised_classes = raised_classes.size();
  report.state_classes = state_classes.size();
  const std::set<std::vector<std::size_t>> expected(state_classes.begin(),
                                                    state_classes.end());
  std::set<std::vector<std::size_t>> projected;
  report.each_is_class = true;
  report.one_to_one = true;
  for (const auto& cls : raised_classes) {
    std::set<std::size_t> states;
    for (auto v : cls) states.insert(raised.state_of(v));
    std::vector<std::size_t> sorted(states.begin(), states.end());
    if (!expected.contains(sorted)) report.each_is_class = false;
    if (!projected.insert(std::move(sorted)).second) report.one_to_one = false;
  }
  report.covers = std::includes(projected.begin(), projected.end(),
                                expected.begin(), expected.end());
  return report;
}

bool check_projection(const MarkovGame& game, std::size_t cap) {
  const auto r = projection_report(game, cap);
  return r.each_is_class && r.covers;
}

}  // namespace logitq
