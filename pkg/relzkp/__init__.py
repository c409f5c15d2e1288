"""
Relativistic two-prover zero-knowledge proofs of graph 3-coloring

Modules exported by this package:

- `relzkp`: command line entry point (graph generation, parameters, runs, attacks, zero-knowledge tests, bounds).
- `field`: arithmetic in the binary extension fields GF(2^N).
- `graph`: colored graphs, color permutations and the connected graph generator.
- `commitment`: the subset relativistic bit commitment and its sizing.
- `bounds`: non-local game values, soundness and resource calculators.
- `protocol`: the four role state machines, the round harness and multi-round runs.
- `strategies`: honest and cheating prover strategies loaded by name.
- `spacetime`: geometry, clocks, latencies and the relativistic timing check.
- `wire`: binary frames exchanged by the roles and a local socket transport.
- `zksim`: witness-free view simulator and exact distribution comparison.
"""
