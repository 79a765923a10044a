#pragma once

#include <cstddef>
#include <vector>

#include "logitq/game.hpp"

namespace logitq {

using StateSet = std::vector<StateIndex>;

// Directed graph over vertices 0..n-1 as sorted adjacency lists.
struct Digraph {
  std::vector<std::vector<std::size_t>> out;

  std::size_t size() const { return out.size(); }
  bool has_edge(std::size_t from, std::size_t to) const;
};

// Edge s -> s' iff some joint action reaches s' from s with positive
// probability.
using StateGraph = Digraph;

StateGraph build_state_graph(const MarkovGame& game);

// Strongly connected components (Tarjan, iterative). Each component sorted.
std::vector<std::vector<std::size_t>> strongly_connected_components(
    const Digraph& g);

// Closed strongly connected components, each sorted, ordered by smallest member.
// Vertices outside every returned set are transient.
std::vector<std::vector<std::size_t>> recurrent_classes(const Digraph& g);

StateSet transient_states(const Digraph& g,
                          const std::vector<std::vector<std::size_t>>& classes);

// Graph over (state, latest profile at every state). Vertex id is
// state * n_profiles^n_states + sum_t profile(t) * n_profiles^(n_states-1-t).
// w -> w' iff w' keeps every other state's profile, the profile at w.state
// changes in at most one agent's action (re-drawing the same action gives the
// self-transition) and the resulting profile reaches w'.state with positive
// probability.
struct RaisedGraph {
  std::size_t n_states = 0;
  std::size_t n_profiles = 0;
  std::size_t strategies = 0;  // n_profiles^n_states
  Digraph graph;

  std::size_t vertex(StateIndex s, std::size_t strategy) const {
    return s * strategies + strategy;
  }
  StateIndex state_of(std::size_t vertex) const { return vertex / strategies; }
  ProfileIndex profile_at(std::size_t vertex, StateIndex s) const;
};

inline constexpr std::size_t kDefaultRaisedVertexCap = 1'000'000;

// Throws SizeError if the vertex count would exceed cap.
RaisedGraph build_raised_graph(const MarkovGame& game,
                               std::size_t cap = kDefaultRaisedVertexCap);

struct ProjectionReport {
  std::size_t raised_classes = 0;
  std::size_t state_classes = 0;
  bool each_is_class = false;  // every projected raised class is a state class
  bool covers = false;         // every state class is some projection
  bool one_to_one = false;     // no two raised classes share a projection
};

// Projects each recurrent class of the raised graph onto original states.
// Profiles at states a class never revisits stay frozen, so one state class
// can carry several raised classes; one_to_one then fails while the other
// two properties hold.
ProjectionReport projection_report(const MarkovGame& game,
                                   std::size_t cap = kDefaultRaisedVertexCap);

// True iff every projected raised class is a recurrent class of the state
// graph and every such class is a projection. one_to_one is not required.
bool check_projection(const MarkovGame& game,
                      std::size_t cap = kDefaultRaisedVertexCap);

}  // namespace logitq
