#pragma once

#include "lll/graph.hpp"
#include "lll/model.hpp"
#include "lll/runtime.hpp"

namespace lll {

Graph path_graph(int n);
Graph cycle_graph(int n);
Graph grid_graph(int rows, int cols);

// Pairing-model generation with rejection of loops and parallel edges;
// bounded retries, then a parameter error.
Graph random_regular_graph(int n, int d, Rng& rng, int max_retries = 500);

// G(n,p) with a hard degree cap: candidate edges in ascending order are
// dropped once either endpoint is saturated.
Graph gnp_capped_graph(int n, double p, int degree_cap, Rng& rng);

// --- instance families --------------------------------------------------------

// Chain of all-ones conjunctions over consecutive variable windows; variable
// i is Bernoulli(q). p = q^k, d = 2(k-1).
LLLInstance conjunction_chain_instance(int num_events, int window, double q);

// One variable per edge of a random d-regular graph on the events; each event
// is the all-ones conjunction over its incident edge variables, so the
// dependency graph is exactly that d-regular graph.
LLLInstance regular_conjunction_instance(int num_events, int d, double q, Rng& rng);

// Per-node Bernoulli(q) activity bits on a graph; event v fires when at least
// `t` nodes of N[v] are active (Poisson-binomial threshold oracles).
LLLInstance threshold_instance(const Graph& g, double q, int t);

}  // namespace lll
